#!/usr/bin/env python3
"""Regenerate the test fixture tree.

Writes the desk-scale corpus sources, compiles them with the pinned gcc,
builds the 20 evaluation bundles, emits the 100-file normalization fixture
set with frozen golden outputs, and captures a labeled stderr corpus of
real compiler/runtime diagnostics.

Fixture outputs are committed; rerun this only when the fixture design
changes, and review golden diffs by hand.
"""

from __future__ import annotations

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

sys.path.insert(0, str(ROOT / "src"))

from redecomp.asmnorm import OptLevel, RawAssemblyUnit, normalize_asm  # noqa: E402

GCC = "gcc"


# --- 50 corpus functions (io tag dominates, per the desk-scale design) --------

CORPUS_FUNCTIONS = {
    # io-tagged (printf/puts/scanf family): 22
    "print_sum": ("#include <stdio.h>\n", "int print_sum(int a, int b) {\n    int s = a + b;\n    printf(\"%d\\n\", s);\n    return s;\n}\n"),
    "print_square": ("#include <stdio.h>\n", "int print_square(int x) {\n    printf(\"%d\\n\", x * x);\n    return x * x;\n}\n"),
    "print_range": ("#include <stdio.h>\n", "void print_range(int n) {\n    int i;\n    for (i = 0; i < n; i++) {\n        printf(\"%d \", i);\n    }\n    printf(\"\\n\");\n}\n"),
    "print_even": ("#include <stdio.h>\n", "void print_even(int n) {\n    int i;\n    for (i = 0; i <= n; i++) {\n        if (i % 2 == 0) {\n            printf(\"%d\\n\", i);\n        }\n    }\n}\n"),
    "print_max": ("#include <stdio.h>\n", "int print_max(int a, int b) {\n    int m = a > b ? a : b;\n    printf(\"max=%d\\n\", m);\n    return m;\n}\n"),
    "print_table": ("#include <stdio.h>\n", "void print_table(int n) {\n    int i;\n    for (i = 1; i <= 10; i++) {\n        printf(\"%d x %d = %d\\n\", n, i, n * i);\n    }\n}\n"),
    "print_abs": ("#include <stdio.h>\n", "int print_abs(int x) {\n    int v = x < 0 ? -x : x;\n    printf(\"%d\\n\", v);\n    return v;\n}\n"),
    "print_countdown": ("#include <stdio.h>\n", "void print_countdown(int n) {\n    while (n > 0) {\n        printf(\"%d\\n\", n);\n        n--;\n    }\n    puts(\"go\");\n}\n"),
    "print_parity": ("#include <stdio.h>\n", "void print_parity(int x) {\n    if (x % 2 == 0) {\n        puts(\"even\");\n    } else {\n        puts(\"odd\");\n    }\n}\n"),
    "print_grade": ("#include <stdio.h>\n", "void print_grade(int score) {\n    if (score >= 90) {\n        puts(\"A\");\n    } else if (score >= 75) {\n        puts(\"B\");\n    } else if (score >= 60) {\n        puts(\"C\");\n    } else {\n        puts(\"F\");\n    }\n}\n"),
    "print_digits": ("#include <stdio.h>\n", "void print_digits(int n) {\n    if (n < 0) {\n        n = -n;\n    }\n    while (n >= 10) {\n        printf(\"%d\\n\", n % 10);\n        n /= 10;\n    }\n    printf(\"%d\\n\", n);\n}\n"),
    "print_fib": ("#include <stdio.h>\n", "void print_fib(int n) {\n    int a = 0;\n    int b = 1;\n    int i;\n    for (i = 0; i < n; i++) {\n        printf(\"%d \", a);\n        int t = a + b;\n        a = b;\n        b = t;\n    }\n    printf(\"\\n\");\n}\n"),
    "print_triangle": ("#include <stdio.h>\n", "void print_triangle(int rows) {\n    int i;\n    int j;\n    for (i = 1; i <= rows; i++) {\n        for (j = 0; j < i; j++) {\n            printf(\"*\");\n        }\n        printf(\"\\n\");\n    }\n}\n"),
    "print_divisors": ("#include <stdio.h>\n", "void print_divisors(int n) {\n    int i;\n    for (i = 1; i <= n; i++) {\n        if (n % i == 0) {\n            printf(\"%d\\n\", i);\n        }\n    }\n}\n"),
    "echo_char_codes": ("#include <stdio.h>\n", "void echo_char_codes(const char *s) {\n    while (*s) {\n        printf(\"%d\\n\", (int)*s);\n        s++;\n    }\n}\n"),
    "print_sign": ("#include <stdio.h>\n", "int print_sign(int x) {\n    int s = 0;\n    if (x > 0) {\n        s = 1;\n    } else if (x < 0) {\n        s = -1;\n    }\n    printf(\"%d\\n\", s);\n    return s;\n}\n"),
    "print_celsius": ("#include <stdio.h>\n", "void print_celsius(int fahrenheit) {\n    int c = (fahrenheit - 32) * 5 / 9;\n    printf(\"%dC\\n\", c);\n}\n"),
    "print_sum_to": ("#include <stdio.h>\n", "int print_sum_to(int n) {\n    int total = 0;\n    int i;\n    for (i = 1; i <= n; i++) {\n        total += i;\n    }\n    printf(\"%d\\n\", total);\n    return total;\n}\n"),
    "report_bounds": ("#include <stdio.h>\n", "void report_bounds(const int *v, int n) {\n    int lo = v[0];\n    int hi = v[0];\n    int i;\n    for (i = 1; i < n; i++) {\n        if (v[i] < lo) {\n            lo = v[i];\n        }\n        if (v[i] > hi) {\n            hi = v[i];\n        }\n    }\n    printf(\"%d %d\\n\", lo, hi);\n}\n"),
    "print_reverse": ("#include <stdio.h>\n", "void print_reverse(const int *v, int n) {\n    int i;\n    for (i = n - 1; i >= 0; i--) {\n        printf(\"%d \", v[i]);\n    }\n    printf(\"\\n\");\n}\n"),
    "print_hex_pairs": ("#include <stdio.h>\n", "void print_hex_pairs(int n) {\n    int i;\n    for (i = 0; i < n; i++) {\n        printf(\"%x:%x\\n\", i, i * 2);\n    }\n}\n"),
    "log_scaled": ("#include <stdio.h>\n", "int log_scaled(int value, int factor) {\n    int scaled = value * factor;\n    fprintf(stdout, \"%d\\n\", scaled);\n    return scaled;\n}\n"),
    # string-tagged: 9
    "count_vowels": ("#include <string.h>\n", "int count_vowels(const char *s) {\n    int n = 0;\n    size_t i;\n    for (i = 0; i < strlen(s); i++) {\n        char c = s[i];\n        if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') {\n            n++;\n        }\n    }\n    return n;\n}\n"),
    "same_text": ("#include <string.h>\n", "int same_text(const char *a, const char *b) {\n    return strcmp(a, b) == 0;\n}\n"),
    "text_length": ("#include <string.h>\n", "int text_length(const char *s) {\n    return (int)strlen(s);\n}\n"),
    "copy_text": ("#include <string.h>\n", "void copy_text(char *dst, const char *src) {\n    strcpy(dst, src);\n    strcat(dst, \"!\");\n}\n"),
    "is_palindrome": ("#include <string.h>\n", "int is_palindrome(const char *s) {\n    int i = 0;\n    int j = (int)strlen(s) - 1;\n    while (i < j) {\n        if (s[i] != s[j]) {\n            return 0;\n        }\n        i++;\n        j--;\n    }\n    return 1;\n}\n"),
    "count_char": ("", "int count_char(const char *s, char c) {\n    int n = 0;\n    while (*s) {\n        if (*s == c) {\n            n++;\n        }\n        s++;\n    }\n    return n;\n}\n"),
    "ends_with_bang": ("#include <string.h>\n", "int ends_with_bang(const char *s) {\n    size_t n = strlen(s);\n    return n > 0 && s[n - 1] == '!';\n}\n"),
    "shared_prefix": ("#include <string.h>\n", "int shared_prefix(const char *a, const char *b) {\n    int n = 0;\n    while (a[n] && b[n] && a[n] == b[n]) {\n        n++;\n    }\n    return n;\n}\n"),
    "upper_count": ("", "int upper_count(const char *s) {\n    int n = 0;\n    while (*s) {\n        if (*s >= 'A' && *s <= 'Z') {\n            n++;\n        }\n        s++;\n    }\n    return n;\n}\n"),
    # math-tagged: 8
    "hypot_int": ("#include <math.h>\n", "double hypot_int(int a, int b) {\n    return sqrt((double)(a * a + b * b));\n}\n"),
    "circle_area": ("#include <math.h>\n", "double circle_area(double r) {\n    return 3.141592653589793 * pow(r, 2.0);\n}\n"),
    "decay_value": ("#include <math.h>\n", "double decay_value(double x) {\n    return exp(-x) * 100.0;\n}\n"),
    "angle_mix": ("#include <math.h>\n", "double angle_mix(double t) {\n    return sin(t) + cos(2.0 * t);\n}\n"),
    "log_ratio": ("#include <math.h>\n", "double log_ratio(double a, double b) {\n    return log(a) - log(b);\n}\n"),
    "round_up_div": ("", "int round_up_div(int a, int b) {\n    return (a + b - 1) / b;\n}\n"),
    "power_int": ("", "long power_int(int base, int n) {\n    long r = 1;\n    int i;\n    for (i = 0; i < n; i++) {\n        r *= base;\n    }\n    return r;\n}\n"),
    "fabs_diff": ("#include <math.h>\n", "double fabs_diff(double a, double b) {\n    return fabs(a - b);\n}\n"),
    # algorithm-tagged (qsort): 3
    "sort_ints": ("#include <stdlib.h>\n\nstatic int cmp_int(const void *a, const void *b);\n", "void sort_ints(int *v, int n) {\n    qsort(v, (size_t)n, sizeof(int), cmp_int);\n}\n"),
    "median_of": ("#include <stdlib.h>\n\nstatic int cmp_int(const void *a, const void *b);\n", "int median_of(int *v, int n) {\n    qsort(v, (size_t)n, sizeof(int), cmp_int);\n    return v[n / 2];\n}\n"),
    "dedup_sorted": ("", "int dedup_sorted(int *v, int n) {\n    if (n == 0) {\n        return 0;\n    }\n    int w = 1;\n    int i;\n    for (i = 1; i < n; i++) {\n        if (v[i] != v[w - 1]) {\n            v[w] = v[i];\n            w++;\n        }\n    }\n    return w;\n}\n"),
    # system-tagged (memcpy/memset/malloc): 4
    "clone_block": ("#include <string.h>\n", "void clone_block(char *dst, const char *src, int n) {\n    memcpy(dst, src, (size_t)n);\n}\n"),
    "zero_fill": ("#include <string.h>\n", "void zero_fill(int *v, int n) {\n    memset(v, 0, (size_t)n * sizeof(int));\n}\n"),
    "dup_ints": ("#include <stdlib.h>\n#include <string.h>\n", "int *dup_ints(const int *v, int n) {\n    int *out = malloc((size_t)n * sizeof(int));\n    if (out != 0) {\n        memcpy(out, v, (size_t)n * sizeof(int));\n    }\n    return out;\n}\n"),
    "release_buf": ("#include <stdlib.h>\n", "void release_buf(void *p) {\n    if (p != 0) {\n        free(p);\n    }\n}\n"),
    # untagged pure arithmetic/logic: 4
    "clamp_int": ("", "int clamp_int(int x, int lo, int hi) {\n    if (x < lo) {\n        return lo;\n    }\n    if (x > hi) {\n        return hi;\n    }\n    return x;\n}\n"),
    "gcd_pair": ("", "int gcd_pair(int a, int b) {\n    while (b != 0) {\n        int t = a % b;\n        a = b;\n        b = t;\n    }\n    return a;\n}\n"),
    "bit_count": ("", "int bit_count(unsigned x) {\n    int n = 0;\n    while (x) {\n        n += (int)(x & 1u);\n        x >>= 1;\n    }\n    return n;\n}\n"),
    "wrap_index": ("", "int wrap_index(int i, int n) {\n    int r = i % n;\n    return r < 0 ? r + n : r;\n}\n"),
}

# helper needed by the qsort-based corpus sources at compile time only
CMP_HELPER = (
    "static int cmp_int(const void *a, const void *b) {\n"
    "    return *(const int *)a - *(const int *)b;\n"
    "}\n"
)


# --- 20 evaluation functions with assertion or stdout drivers -----------------

EVAL_BUNDLES = [
    {
        "sample_id": "he_000",
        "func": "int func0(int a, int b) {\n    return a + b;\n}\n",
        "driver": "#include <assert.h>\nint func0(int, int);\nint main(void) {\n    assert(func0(2, 3) == 5);\n    assert(func0(-4, 4) == 0);\n    assert(func0(100, 23) == 123);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_001",
        "func": "int func0(int x) {\n    return x * x * x;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(2) == 8);\n    assert(func0(-3) == -27);\n    assert(func0(0) == 0);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_002",
        "func": "int func0(int a, int b, int c) {\n    int m = a;\n    if (b > m) {\n        m = b;\n    }\n    if (c > m) {\n        m = c;\n    }\n    return m;\n}\n",
        "driver": "#include <assert.h>\nint func0(int, int, int);\nint main(void) {\n    assert(func0(1, 2, 3) == 3);\n    assert(func0(9, 2, 3) == 9);\n    assert(func0(1, 7, 3) == 7);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_003",
        "func": "int func0(int n) {\n    int s = 0;\n    if (n < 0) {\n        n = -n;\n    }\n    while (n > 0) {\n        s += n % 10;\n        n /= 10;\n    }\n    return s;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(1234) == 10);\n    assert(func0(-55) == 10);\n    assert(func0(0) == 0);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_004",
        "func": "int func0(int n) {\n    int r = 0;\n    if (n < 0) {\n        return -1;\n    }\n    while (n > 0) {\n        r = r * 10 + n % 10;\n        n /= 10;\n    }\n    return r;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(123) == 321);\n    assert(func0(1500) == 51);\n    assert(func0(-2) == -1);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_005",
        "func": "int func0(int n) {\n    if (n < 2) {\n        return 0;\n    }\n    int i;\n    for (i = 2; i * i <= n; i++) {\n        if (n % i == 0) {\n            return 0;\n        }\n    }\n    return 1;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(2) == 1);\n    assert(func0(17) == 1);\n    assert(func0(15) == 0);\n    assert(func0(1) == 0);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_006",
        "func": "long func0(int n) {\n    long f = 1;\n    int i;\n    for (i = 2; i <= n; i++) {\n        f *= i;\n    }\n    return f;\n}\n",
        "driver": "#include <assert.h>\nlong func0(int);\nint main(void) {\n    assert(func0(0) == 1);\n    assert(func0(5) == 120);\n    assert(func0(10) == 3628800L);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_007",
        "func": "int func0(int n) {\n    int a = 0;\n    int b = 1;\n    int i;\n    for (i = 0; i < n; i++) {\n        int t = a + b;\n        a = b;\n        b = t;\n    }\n    return a;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(0) == 0);\n    assert(func0(1) == 1);\n    assert(func0(10) == 55);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_008",
        "func": "int func0(const int *v, int n) {\n    int s = 0;\n    int i;\n    for (i = 0; i < n; i++) {\n        s += v[i];\n    }\n    return s;\n}\n",
        "driver": "#include <assert.h>\nint func0(const int *, int);\nint main(void) {\n    int a[5] = {1, 2, 3, 4, 5};\n    int b[2] = {-7, 7};\n    assert(func0(a, 5) == 15);\n    assert(func0(b, 2) == 0);\n    assert(func0(a, 0) == 0);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_009",
        "func": "int func0(const int *v, int n) {\n    int m = v[0];\n    int i;\n    for (i = 1; i < n; i++) {\n        if (v[i] > m) {\n            m = v[i];\n        }\n    }\n    return m;\n}\n",
        "driver": "#include <assert.h>\nint func0(const int *, int);\nint main(void) {\n    int a[4] = {3, 9, 2, 7};\n    int b[1] = {-5};\n    assert(func0(a, 4) == 9);\n    assert(func0(b, 1) == -5);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_010",
        "func": "int func0(int x) {\n    int n = 0;\n    while (x) {\n        n += x & 1;\n        x = (int)((unsigned)x >> 1);\n    }\n    return n;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(0) == 0);\n    assert(func0(7) == 3);\n    assert(func0(255) == 8);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_011",
        "func": "int func0(int a, int b) {\n    while (b != 0) {\n        int t = a % b;\n        a = b;\n        b = t;\n    }\n    return a < 0 ? -a : a;\n}\n",
        "driver": "#include <assert.h>\nint func0(int, int);\nint main(void) {\n    assert(func0(12, 18) == 6);\n    assert(func0(7, 13) == 1);\n    assert(func0(0, 5) == 5);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_012",
        "func": "int func0(const char *s) {\n    int n = 0;\n    while (s[n]) {\n        n++;\n    }\n    return n;\n}\n",
        "driver": "#include <assert.h>\nint func0(const char *);\nint main(void) {\n    assert(func0(\"\") == 0);\n    assert(func0(\"abc\") == 3);\n    assert(func0(\"hello world\") == 11);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_013",
        "func": "int func0(const char *s) {\n    int i = 0;\n    int j = 0;\n    while (s[j]) {\n        j++;\n    }\n    j--;\n    while (i < j) {\n        if (s[i] != s[j]) {\n            return 0;\n        }\n        i++;\n        j--;\n    }\n    return 1;\n}\n",
        "driver": "#include <assert.h>\nint func0(const char *);\nint main(void) {\n    assert(func0(\"racecar\") == 1);\n    assert(func0(\"abc\") == 0);\n    assert(func0(\"\") == 1);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_014",
        "func": "int func0(int y) {\n    if (y % 400 == 0) {\n        return 1;\n    }\n    if (y % 100 == 0) {\n        return 0;\n    }\n    return y % 4 == 0;\n}\n",
        "driver": "#include <assert.h>\nint func0(int);\nint main(void) {\n    assert(func0(2000) == 1);\n    assert(func0(1900) == 0);\n    assert(func0(2024) == 1);\n    assert(func0(2023) == 0);\n    return 0;\n}\n",
        "opt_level": "O0",
    },
    {
        "sample_id": "he_015",
        "func": "int func0(int n, int k) {\n    if (k < 0 || k > n) {\n        return 0;\n    }\n    long r = 1;\n    int i;\n    for (i = 0; i < k; i++) {\n        r = r * (n - i) / (i + 1);\n    }\n    return (int)r;\n}\n",
        "driver": "#include <assert.h>\nint func0(int, int);\nint main(void) {\n    assert(func0(5, 2) == 10);\n    assert(func0(10, 0) == 1);\n    assert(func0(6, 3) == 20);\n    assert(func0(4, 7) == 0);\n    return 0;\n}\n",
        "opt_level": "O1",
    },
    {
        "sample_id": "he_016",
        "func": "int func0(int *v, int n) {\n    int i;\n    int j;\n    for (i = 0; i < n - 1; i++) {\n        for (j = 0; j < n - 1 - i; j++) {\n            if (v[j] > v[j + 1]) {\n                int t = v[j];\n                v[j] = v[j + 1];\n                v[j + 1] = t;\n            }\n        }\n    }\n    return n == 0 ? 0 : v[0];\n}\n",
        "driver": "#include <assert.h>\nint func0(int *, int);\nint main(void) {\n    int a[5] = {5, 1, 4, 2, 3};\n    assert(func0(a, 5) == 1);\n    assert(a[4] == 5);\n    assert(a[2] == 3);\n    return 0;\n}\n",
        "opt_level": "O1",
    },
    {
        "sample_id": "he_017",
        "func": "#include <stdio.h>\n\nvoid func0(int n) {\n    int i;\n    for (i = 1; i <= n; i++) {\n        if (i % 15 == 0) {\n            printf(\"fizzbuzz\\n\");\n        } else if (i % 3 == 0) {\n            printf(\"fizz\\n\");\n        } else if (i % 5 == 0) {\n            printf(\"buzz\\n\");\n        } else {\n            printf(\"%d\\n\", i);\n        }\n    }\n}\n",
        "driver": "void func0(int);\nint main(void) {\n    func0(15);\n    return 0;\n}\n",
        "opt_level": "O0",
        "stdout_driver": True,
    },
    {
        "sample_id": "he_018",
        "func": "#include <stdio.h>\n\nint func0(int base, int n) {\n    int r = 1;\n    int i;\n    for (i = 0; i < n; i++) {\n        r *= base;\n    }\n    printf(\"%d\\n\", r);\n    return r;\n}\n",
        "driver": "int func0(int, int);\nint main(void) {\n    func0(2, 10);\n    func0(3, 4);\n    func0(7, 0);\n    return 0;\n}\n",
        "opt_level": "O0",
        "stdout_driver": True,
    },
    {
        "sample_id": "he_019",
        "func": "int func0(int x, int lo, int hi) {\n    if (x < lo) {\n        return lo;\n    }\n    if (x > hi) {\n        return hi;\n    }\n    return x;\n}\n",
        "driver": "#include <assert.h>\nint func0(int, int, int);\nint main(void) {\n    assert(func0(5, 0, 10) == 5);\n    assert(func0(-5, 0, 10) == 0);\n    assert(func0(50, 0, 10) == 10);\n    return 0;\n}\n",
        "opt_level": "O2",
    },
]


def run(cmd, **kw):
    env = dict(kw.pop("env", None) or __import__("os").environ)
    env["LC_ALL"] = "C"
    return subprocess.run(cmd, capture_output=True, text=True, check=False, env=env, **kw)


def compile_to_s(source: str, out_path: Path, opt: str) -> None:
    with tempfile.TemporaryDirectory() as td:
        src = Path(td, "input.c")
        src.write_text(source, encoding="utf-8")
        proc = run([GCC, "-S", f"-{opt}", "-o", str(out_path), str(src)])
        if proc.returncode != 0:
            raise RuntimeError(f"compile failed for {out_path.name}:\n{proc.stderr}")


def objdump_listing(source: str, opt: str) -> str:
    with tempfile.TemporaryDirectory() as td:
        src = Path(td, "input.c")
        obj = Path(td, "input.o")
        src.write_text(source, encoding="utf-8")
        proc = run([GCC, "-c", f"-{opt}", "-o", str(obj), str(src)])
        if proc.returncode != 0:
            raise RuntimeError(f"objdump compile failed:\n{proc.stderr}")
        proc = run(["objdump", "-d", "--no-show-raw-insn", str(obj)])
        if proc.returncode != 0:
            raise RuntimeError(f"objdump failed:\n{proc.stderr}")
        # keep only the disassembly section (drop the file-format header)
        lines = proc.stdout.splitlines()
        start = next(i for i, l in enumerate(lines) if "Disassembly" in l)
        return "\n".join(lines[start + 1 :]).strip("\n") + "\n"


def write_corpus_sources() -> None:
    out = FIXTURES / "corpus_src"
    out.mkdir(parents=True, exist_ok=True)
    levels = ["O0", "O1", "O2", "O3"]
    for i, (name, (includes, body)) in enumerate(sorted(CORPUS_FUNCTIONS.items())):
        source = includes + ("\n" if includes else "") + body
        compile_source = source
        if "qsort" in body:
            compile_source = source + "\n" + CMP_HELPER
        (out / f"{name}.c").write_text(source, encoding="utf-8")
        compile_to_s(compile_source, out / f"{name}.s", levels[i % 4])
    print(f"corpus sources: {len(CORPUS_FUNCTIONS)} pairs in {out}")


def write_eval_bundles() -> None:
    out = FIXTURES / "bundles"
    if out.exists():
        shutil.rmtree(out)
    out.mkdir(parents=True)
    for spec in EVAL_BUNDLES:
        bdir = out / spec["sample_id"]
        bdir.mkdir()
        (bdir / "func0.c").write_text(spec["func"], encoding="utf-8")
        (bdir / "driver.c").write_text(spec["driver"], encoding="utf-8")
        compile_to_s(spec["func"], bdir / "target.s", spec["opt_level"])
        meta = {
            "sample_id": spec["sample_id"],
            "dataset": "mini-he",
            "compiler_id": "gcc",
            "opt_level": spec["opt_level"],
        }
        (bdir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")

        # validate: ground truth must pass its own driver
        with tempfile.TemporaryDirectory() as td:
            Path(td, "candidate.c").write_text(spec["func"], encoding="utf-8")
            Path(td, "driver.c").write_text(spec["driver"], encoding="utf-8")
            proc = run([GCC, "-O0", "-o", "prog", "candidate.c", "driver.c", "-lm"], cwd=td)
            if proc.returncode != 0:
                raise RuntimeError(f"{spec['sample_id']}: driver build failed\n{proc.stderr}")
            proc = run(["./prog"], cwd=td)
            if proc.returncode != 0:
                raise RuntimeError(f"{spec['sample_id']}: ground truth fails driver\n{proc.stderr}")
            if spec.get("stdout_driver"):
                (bdir / "expected_stdout.txt").write_text(proc.stdout, encoding="utf-8")
    print(f"eval bundles: {len(EVAL_BUNDLES)} in {out}")


def write_norm_fixtures() -> None:
    """100 assembly fixtures + frozen golden normalizations."""
    asm_dir = FIXTURES / "asm"
    golden_dir = FIXTURES / "golden_asm"
    for d in (asm_dir, golden_dir):
        if d.exists():
            shutil.rmtree(d)
        d.mkdir(parents=True)

    names = sorted(CORPUS_FUNCTIONS)
    count = 0
    # 50 compiler emissions at a second optimization level
    levels = ["O2", "O3", "O0", "O1"]
    for i, name in enumerate(names):
        includes, body = CORPUS_FUNCTIONS[name]
        source = includes + ("\n" if includes else "") + body
        if "qsort" in body:
            source = source + "\n" + CMP_HELPER
        compile_to_s(source, asm_dir / f"{name}__alt.s", levels[i % 4])
        count += 1
    # reuse the 50 corpus emissions
    for name in names:
        shutil.copy(FIXTURES / "corpus_src" / f"{name}.s", asm_dir / f"{name}.s")
        count += 1
    # swap 10 of the alt emissions for objdump-style dumps with addresses
    for name in names[:10]:
        includes, body = CORPUS_FUNCTIONS[name]
        source = includes + ("\n" if includes else "") + body
        if "qsort" in body:
            source = source + "\n" + CMP_HELPER
        (asm_dir / f"{name}__alt.s").write_text(
            objdump_listing(source, "O1"), encoding="utf-8"
        )

    for asm_path in sorted(asm_dir.glob("*.s")):
        unit = RawAssemblyUnit(
            origin_path=asm_path.name,
            compiler_id="gcc",
            opt_level=OptLevel.O0,
            text=asm_path.read_text(encoding="utf-8"),
        )
        normalized = normalize_asm(unit)
        (golden_dir / f"{asm_path.stem}.norm.txt").write_text(
            normalized.body + "\n", encoding="utf-8"
        )
    print(f"normalization fixtures: {count} asm files, goldens in {golden_dir}")


BROKEN_SNIPPETS = [
    # (label, source) — compiled to harvest authentic gcc diagnostics
    ("Syntax", "int f(int a) { int b = a + 1 return b; }"),
    ("Syntax", "int f(void) { return 1; "),
    ("Syntax", "int f(int x) { if (x > 0 { return 1; } return 0; }"),
    ("Syntax", "int f(void) { char *s = \"abc; return 0; }"),
    ("Syntax", "int f(void) { int a = 5 @ 3; return a; }"),
    ("Syntax", "int f(int n) { for (int i = 0 i < n; i++) { n--; } return n; }"),
    ("Syntax", "int f(void) { return (1 + ; }"),
    ("Syntax", "int f(void) { int x = ; return x; }"),
    ("Return", "void f(int x) { return x; }"),
    ("Return", "void g(void); int f(void) { return g(); }"),
    ("Return", "int g(int a) { return a; } int f(void) { return g(1, 2, 3); }"),
    ("Return", "int g(int a, int b) { return a + b; } int f(void) { return g(1); }"),
    ("Return", "void g(void); int f(void) { return g() + 1; }"),
    ("Type", "int f(void) { int *p = 3.5; return *p; }"),
    ("Type", "struct s; int f(struct s *p) { return p->x; }"),
    ("Type", "int f(void) { int a[3]; int b[3]; a = b; return a[0]; }"),
    ("Type", "int f(int *p) { return p > 5; }"),
    ("Declaration", "int f(int x) { return helper(x) + 1; }"),
    ("Declaration", "int f(void) { return undeclared_var + 1; }"),
    ("Declaration", "int f(void) { unknown_t v = 0; return v; }"),
    ("Declaration", "int f(void) { return 1; } int f(void) { return 2; }"),
    ("Declaration", "int x; double x; int f(void) { return 0; }"),
]

RUNTIME_SNIPPETS = [
    ("Assert", "#include <assert.h>\nint main(void) { int res = 2 + 2; assert(res == 5); return 0; }"),
    ("Assert", "#include <assert.h>\nint main(void) { assert(1 == 0 && \"impossible\"); return 0; }"),
    ("RuntimeLink", "int main(void) { int *p = 0; return *p; }"),
    ("RuntimeLink", "int main(void) { int d = 0; return 10 / d; }"),
]

LINKTIME_SNIPPETS = [
    ("Declaration", "int helper(int);\nint main(void) { return helper(4); }"),
]

HAND_WRITTEN = [
    # messages transcribed from real tool output; cover the long tail
    ("Assert", "prog: driver.c:6: main: Assertion `func0(10) == 55' failed."),
    ("Assert", "Assertion failed: (result == expected), function main, file driver.c, line 12."),
    ("Assert", "stdout does not match expected output"),
    ("Assert", "candidate output mismatch: expected '42', got '41'"),
    ("Syntax", "candidate.c:4:12: error: expected ';' before 'return'"),
    ("Syntax", "candidate.c:9:1: error: expected declaration or statement at end of input"),
    ("Syntax", "candidate.c:2:18: error: missing terminating \" character"),
    ("Syntax", "candidate.c:7:5: error: stray '\\342' in program"),
    ("Return", "candidate.c:3:5: error: void value not ignored as it ought to be"),
    ("Return", "candidate.c:11:9: warning: 'return' with no value, in function returning non-void"),
    ("Return", "candidate.c:8:12: error: too few arguments to function 'compute'"),
    ("Type", "candidate.c:5:15: error: invalid operands to binary * (have 'int *' and 'double')"),
    ("Type", "candidate.c:3:9: error: incompatible types when assigning to type 'int' from type 'struct pair'"),
    ("Type", "candidate.c:12:4: warning: comparison between pointer and integer"),
    ("Declaration", "/usr/bin/ld: /tmp/ccX.o: in function `main': undefined reference to `helper'"),
    ("Declaration", "candidate.c:6:5: warning: implicit declaration of function 'process' [-Wimplicit-function-declaration]"),
    ("Declaration", "candidate.c:2:7: error: redefinition of 'counter'"),
    ("RuntimeLink", "Segmentation fault (core dumped)"),
    ("RuntimeLink", "timeout after 5s"),
    ("RuntimeLink", "*** stack smashing detected ***: terminated"),
    ("RuntimeLink", "Floating point exception (core dumped)"),
    ("Other", "internal compiler error: in expand_expr_real_1"),
    ("Other", "The model did not produce any code."),
    ("Other", "collect2: fatal error: response file missing"),
]


def harvest_stderr_corpus() -> None:
    """50 labeled diagnostics: real gcc/runtime output plus transcribed ones."""
    rows = []
    with tempfile.TemporaryDirectory() as td:
        for label, code in BROKEN_SNIPPETS:
            src = Path(td, "broken.c")
            src.write_text(code + "\n", encoding="utf-8")
            proc = run([GCC, "-O0", "-c", "-o", str(Path(td, "broken.o")), str(src)], cwd=td)
            text = proc.stderr.replace(str(td), "<work>").strip()
            if not text:
                raise RuntimeError(f"snippet produced no stderr: {code!r}")
            rows.append({"label": label, "stderr": text, "origin": "gcc-compile"})
        for label, code in RUNTIME_SNIPPETS:
            src = Path(td, "rt.c")
            src.write_text(code + "\n", encoding="utf-8")
            proc = run([GCC, "-O0", "-o", str(Path(td, "rt")), str(src)], cwd=td)
            if proc.returncode != 0:
                raise RuntimeError(f"runtime snippet failed to build: {proc.stderr}")
            rproc = run(["./rt"], cwd=td)
            text = rproc.stderr.replace(str(td), "<work>").strip()
            if not text:
                text = f"exit status {rproc.returncode}"
            rows.append({"label": label, "stderr": text, "origin": "runtime"})
        for label, code in LINKTIME_SNIPPETS:
            src = Path(td, "lt.c")
            src.write_text(code + "\n", encoding="utf-8")
            proc = run([GCC, "-O0", "-o", str(Path(td, "lt")), str(src)], cwd=td)
            text = proc.stderr.replace(str(td), "<work>").strip()
            rows.append({"label": label, "stderr": text, "origin": "gcc-link"})
    for label, text in HAND_WRITTEN:
        rows.append({"label": label, "stderr": text, "origin": "transcribed"})
    assert len(rows) >= 50, f"need 50 labeled messages, have {len(rows)}"
    rows = rows[:50]
    out = FIXTURES / "stderr_corpus.jsonl"
    with out.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    labels = {}
    for row in rows:
        labels[row["label"]] = labels.get(row["label"], 0) + 1
    print(f"stderr corpus: {len(rows)} messages {labels} -> {out}")


def write_flag_fixture() -> None:
    out = FIXTURES / "flags"
    out.mkdir(parents=True, exist_ok=True)
    frame_source = (
        "int helper(int v);\n"
        "\n"
        "int func0(int n) {\n"
        "    int buf[8];\n"
        "    int i;\n"
        "    for (i = 0; i < 8; i++) {\n"
        "        buf[i] = helper(n + i);\n"
        "    }\n"
        "    int acc = 0;\n"
        "    for (i = 0; i < 8; i++) {\n"
        "        if (buf[i] > 0 && buf[i] % 2 == 0) {\n"
        "            acc += buf[i];\n"
        "        } else {\n"
        "            acc -= 1;\n"
        "        }\n"
        "    }\n"
        "    return acc;\n"
        "}\n"
    )
    (out / "frame.c").write_text(frame_source, encoding="utf-8")
    planted = [
        "-fomit-frame-pointer",
        "-finstrument-functions",
        "-ftree-ter",
        "-ftree-coalesce-vars",
        "-fcrossjumping",
        "-fipa-pure-const",
        "-fgcse",
        "-ftree-loop-distribution",
    ]
    (out / "planted_flags.txt").write_text("\n".join(planted) + "\n", encoding="utf-8")
    print(f"flag fixture: {out}")


GOLDEN_EXEMPLARS = [
    ("movl $1 , eax\nret", "int func0(void) {\n    return 1;\n}\n", 0.95),
    ("movl edi , eax\naddl esi , eax\nret", "int func0(int a, int b) {\n    return a + b;\n}\n", 0.91),
    ("movl edi , eax\nimull esi , eax\nret", "int func0(int a, int b) {\n    return a * b;\n}\n", 0.88),
    ("movl edi , eax\nnegl eax\nret", "int func0(int x) {\n    return -x;\n}\n", 0.74),
    ("xorl eax , eax\nret", "int func0(void) {\n    return 0;\n}\n", 0.60),
]

GOLDEN_TARGET = "endbr64\nmovl edi , eax\nsubl esi , eax\nret"


def write_golden_prompts() -> None:
    from redecomp.context import Exemplar, build_retrieval_prompt, build_rule_prompt, load_rules

    out = FIXTURES / "golden_prompts"
    out.mkdir(parents=True, exist_ok=True)
    exemplars = [Exemplar(a, s, score) for a, s, score in GOLDEN_EXEMPLARS]
    retrieval = build_retrieval_prompt(GOLDEN_TARGET, exemplars, 5)
    (out / "retrieval_k5.txt").write_text(retrieval.text, encoding="utf-8")
    rule = build_rule_prompt(GOLDEN_TARGET, load_rules().get("-ftree-coalesce-vars"))
    (out / "rule_ftree_coalesce_vars.txt").write_text(rule.text, encoding="utf-8")
    print(f"golden prompts: {out}")


def write_golden_source() -> None:
    from redecomp.asmnorm import canonicalize_source

    out = FIXTURES / "golden_src"
    out.mkdir(parents=True, exist_ok=True)
    includes, body = CORPUS_FUNCTIONS["print_fib"]
    canon = canonicalize_source(includes + "\n" + body)
    (out / "print_fib.canon.c").write_text(canon.body, encoding="utf-8")
    print(f"golden canonical source: {out}")


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_corpus_sources()
    write_eval_bundles()
    write_norm_fixtures()
    harvest_stderr_corpus()
    write_flag_fixture()
    write_golden_prompts()
    write_golden_source()
    print("fixtures regenerated")


if __name__ == "__main__":
    main()
