import json

import pytest
from hypothesis import given, settings

from pervcone import io
from pervcone.complexes import single
from pervcone.extensions import quiver_encode
from pervcone.field import GF, QQ
from pervcone.groups import cyclic_group, symmetric_group, random_module
from pervcone.io import InputError
from pervcone.perverse import B_d, datum_isomorphism

from _strategies import complexes, data, modules


@given(modules())
def test_module_roundtrip(E):
    back = io.module_from_json(json.loads(io.dumps(io.module_to_json(E, with_group=True))))
    assert back.dim == E.dim and back.action == E.action and back.field == E.field


def test_rational_entries_roundtrip():
    E = random_module(cyclic_group(3), QQ, 2, seed=7, exact=True)
    assert io.module_from_json(io.module_to_json(E), E.group).action == E.action


def test_group_roundtrip():
    G = symmetric_group(3)
    assert io.group_from_json(json.loads(io.dumps(io.group_to_json(G)))).mul == G.mul
    assert io.group_from_json("C4").order == 4


@given(complexes(group_names=["C1", "C2", "C3"]))
@settings(max_examples=15)
def test_complex_roundtrip(K):
    back = io.complex_from_json(json.loads(io.dumps(io.complex_to_json(K))))
    assert back.dims() == K.dims()
    assert all(back.cohomology_dims(n) == K.cohomology_dims(n) for n in K.degrees)


@given(complexes(kind="module", group_names=["C2"]))
@settings(max_examples=5)
def test_module_complex_roundtrip(K):
    back = io.complex_from_json(json.loads(io.dumps(io.complex_to_json(K))))
    assert [d.matrix for d in back.diffs] == [d.matrix for d in K.diffs]


@given(data(ds=(1, 2)))
@settings(max_examples=15)
def test_datum_roundtrip(O):
    back = io.datum_from_json(json.loads(io.dumps(io.datum_to_json(O))))
    assert back.u.phi_V == O.u.phi_V and back.u.phi_W == O.u.phi_W
    assert back.sigma.matrix == O.sigma.matrix and back.F.s == O.F.s
    assert datum_isomorphism(O, back) is not None


@given(data(ds=(1,), group_names=("C2", "C3")))
@settings(max_examples=10)
def test_quiver_roundtrip(O):
    Q = quiver_encode(O)
    back = io.quiver_from_json(json.loads(io.dumps(io.quiver_to_json(Q))))
    assert back.u == Q.u and back.v == Q.v and back.is_valid()


def test_dumps_is_canonical():
    assert io.dumps({"b": 1, "a": [1, 2]}) == io.dumps({"a": [1, 2], "b": 1})
    assert io.dumps({}).endswith("\n")


@pytest.mark.parametrize("payload,where", [
    ({"group": "C2", "field": {"char": 2}, "dim": 1}, "$.action"),
    ({"group": "C2", "field": {"char": 4}, "dim": 1, "action": []}, "$.field.char"),
    ({"group": "C2", "field": {"char": 2}, "dim": -1, "action": []}, "$.dim"),
    ({"group": "D7", "field": {"char": 2}, "dim": 1, "action": []}, "$.group"),
    ({"group": "C2", "field": {"char": 2}, "dim": 1,
      "action": [{"rows": 1, "cols": 1, "entries": [[1]]}, {"rows": 1, "cols": 1, "entries": [[1, 0]]}]},
     "$.action[1].entries[0]"),
    ({"group": "C2", "field": {"char": 3}, "dim": 1,
      "action": [{"rows": 1, "cols": 1, "entries": [[1]]}, {"rows": 1, "cols": 1, "entries": [[2]]}]},
     None),
])
def test_module_errors_carry_path(payload, where):
    if where is None:
        # a valid C2 action over GF(3) by -1
        assert io.module_from_json(payload).dim == 1
        return
    with pytest.raises(InputError) as e:
        io.module_from_json(payload)
    assert e.value.path == where


def test_non_homomorphism_rejected():
    bad = {"group": "C3", "field": {"char": 0}, "dim": 1,
           "action": [{"rows": 1, "cols": 1, "entries": [[1]]}] + [{"rows": 1, "cols": 1, "entries": [[2]]}] * 2}
    with pytest.raises(InputError):
        io.module_from_json(bad)


def test_bad_datum_rejected():
    from pervcone.extensions import p_direct_image
    from pervcone.groups import trivial_module
    O = p_direct_image(trivial_module(cyclic_group(2), GF(3), 1), 1)
    j = io.datum_to_json(O)
    j["sigma"]["entries"] = [[0]]
    with pytest.raises(InputError):
        io.datum_from_json(j)
    j = io.datum_to_json(O)
    j["d"] = 0
    with pytest.raises(InputError) as e:
        io.datum_from_json(j)
    assert e.value.path == "$.d"


def test_file_errors(tmp_path):
    with pytest.raises(InputError):
        io.load_file(tmp_path / "missing.json")
    p = tmp_path / "bad.json"
    p.write_text("{ nope")
    with pytest.raises(InputError) as e:
        io.load_file(p)
    assert "malformed JSON" in str(e.value)
