import json

import numpy as np
import pytest

from quivrep import fmodule, io
from quivrep.quiver import example_quiver, load_quiver
from quivrep.representation import random_rep

DATA = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"


def test_parse_module_literals():
    r = fmodule.ring(4)
    assert io.parse_module("Z/4 + Z/2", r).orders == (4, 2)
    assert io.parse_module("0", r).is_zero
    with pytest.raises(ValueError):
        io.parse_module("Z/3", r)
    with pytest.raises(ValueError):
        io.parse_module("Q", r)


def test_parse_matrix_forms():
    assert io.parse_matrix("[[1,0],[0,2]]", 2, 2).tolist() == [[1, 0], [0, 2]]
    assert io.parse_matrix("1 0; 0 2", 2, 2).tolist() == [[1, 0], [0, 2]]
    assert io.parse_matrix("[]", 0, 3).shape == (0, 3)
    with pytest.raises(ValueError):
        io.parse_matrix("[[1]]", 2, 2)


def test_example_files_load():
    q = load_quiver(DATA / "example.quiver")
    assert q == example_quiver()
    x = io.load_representation(DATA / "gf_not_flat.rep")
    assert x.modules["3"].orders == (4,) and x.maps["a"].matrix.tolist() == [[2]]


def test_representation_file_errors_have_line_numbers(tmp_path):
    (tmp_path / "q.quiver").write_text(example_quiver().to_text())
    cases = {
        "quiver q.quiver\nring 4\nmodule 9 Z/2\n": 3,
        "quiver q.quiver\nring 4\nmodule 1 Z/2\nmap zz [[1]]\n": 4,
        "quiver q.quiver\nring 4\nmodule 1 Z/3\n": 3,
        "quiver q.quiver\nring 4\nbogus\n": 3,
        "quiver q.quiver\nring 4\nmodule 1 Z/4\nmodule 3 Z/2\nmap a [[1,1]]\n": 5,
    }
    for text, line in cases.items():
        with pytest.raises(io.ParseError) as err:
            io.parse_representation(text, tmp_path)
        assert err.value.lineno == line, text
    with pytest.raises(io.ParseError):
        io.parse_representation("ring 4\n", tmp_path)


def test_format_parse_roundtrip(tmp_path):
    (tmp_path / "q.quiver").write_text(example_quiver().to_text())
    rng = np.random.default_rng(51)
    for _ in range(20):
        x = random_rep(example_quiver(), 4, rng, max_order=8)
        text = io.format_representation(x, "q.quiver")
        assert io.parse_representation(text, tmp_path) == x


def test_json_is_deterministic():
    x = random_rep(example_quiver(), 4, np.random.default_rng(52))
    a = io.dumps(io.rep_to_json(x))
    assert a == io.dumps(json.loads(a))
    assert io.rep_from_json(json.loads(a)) == x
