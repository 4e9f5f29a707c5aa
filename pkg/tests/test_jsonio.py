"""Byte-determinism contract of the JSON and CSV emitters."""

import json
import math

import numpy as np
import pytest

from tilthover.jsonio import csv_cell, csv_text, dumps, format_float


class TestFloatFormat:
    def test_twelve_significant_digits(self):
        assert format_float(math.pi) == "3.14159265359"
        assert format_float(1.0) == "1"
        assert format_float(1e-7) == "1e-07"

    def test_negative_zero_normalized(self):
        assert format_float(-0.0) == "0"

    def test_non_finite_become_null(self):
        assert format_float(float("nan")) == "null"
        assert format_float(float("inf")) == "null"
        assert format_float(float("-inf")) == "null"


class TestDumps:
    def test_output_is_valid_json(self):
        obj = {
            "name": "a b",
            "count": 3,
            "ok": True,
            "missing": None,
            "vec": [1.0, 2.5, -3.0],
            "nested": {"rows": [[1, 2], [3, 4]], "empty": {}, "none": []},
        }
        parsed = json.loads(dumps(obj))
        assert parsed == obj

    def test_byte_identical_for_equal_inputs(self):
        a = {"x": [0.1 + 0.2, float(np.float64(1) / 3)], "m": {"k": 7}}
        b = {"x": [0.30000000000000004, 1.0 / 3.0], "m": {"k": 7}}
        assert dumps(a) == dumps(b)

    def test_insertion_order_preserved(self):
        assert dumps({"b": 1, "a": 2}).index('"b"') < dumps({"b": 1, "a": 2}).index('"a"')

    def test_short_numeric_lists_inline(self):
        text = dumps({"v": [1.0, 2.0, 3.0]})
        assert '"v": [1, 2, 3]' in text
        long = dumps({"v": list(range(7))})
        assert '"v": [\n' in long

    def test_nan_inside_structures(self):
        assert json.loads(dumps({"x": float("nan")}))["x"] is None
        assert json.loads(dumps([np.inf, 1.0])) == [None, 1.0]

    def test_numpy_scalars_and_arrays(self):
        text = dumps({"a": np.float64(0.5), "n": np.int64(4), "arr": np.arange(3.0)})
        assert json.loads(text) == {"a": 0.5, "n": 4, "arr": [0, 1, 2]}

    def test_string_escapes(self):
        tricky = 'quote " backslash \\ newline \n tab \t bell \x07'
        assert json.loads(dumps({"s": tricky}))["s"] == tricky

    def test_trailing_newline(self):
        assert dumps({"k": 1}).endswith("}\n")
        assert dumps([]) == "[]\n"

    def test_unsupported_type_raises(self):
        with pytest.raises(TypeError, match="cannot emit"):
            dumps({"x": object()})
        with pytest.raises(TypeError, match="keys"):
            dumps({1: "x"})


class TestCsv:
    def test_cells(self):
        assert csv_cell(None) == ""
        assert csv_cell(True) == "true"
        assert csv_cell(False) == "false"
        assert csv_cell(1.5) == "1.5"
        assert csv_cell(float("nan")) == "nan"
        assert csv_cell(np.int32(9)) == "9"
        assert csv_cell("plain") == "plain"

    def test_quoting_of_delimiters(self):
        assert csv_cell("a,b") == '"a,b"'
        assert csv_cell('say "hi"') == '"say ""hi"""'
        assert csv_cell("two\nlines") == '"two\nlines"'

    def test_text_layout(self):
        text = csv_text(["t", "x"], [[0.0, 1.0], [0.1, 2.0]], comments=["tool: demo"])
        assert text == "# tool: demo\nt,x\n0,1\n0.1,2\n"

    def test_no_comments_no_comment_lines(self):
        assert csv_text(["a"], [[1]]).startswith("a\n")

    def test_lf_endings_only(self):
        text = csv_text(["a"], [[1], [2]], comments=["c"])
        assert "\r" not in text
        assert text.endswith("\n")
