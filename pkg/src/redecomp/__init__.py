"""Context-guided decompilation pipeline.

Builds (assembly, source) retrieval corpora, serves exemplar- and
rule-based prompts to an external code model, and verifies candidates by
recompilation and execution.
"""

__version__ = "0.1.0"
