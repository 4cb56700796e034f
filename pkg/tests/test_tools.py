import hashlib

import pytest

import latentfair.tools as tools


cell_names_data = [(("C", 0), "C-0"), (("C", 1), "C-1"), (("AA", 0), "AA-0"),
                   (("AA", 1), "AA-1")]


@pytest.mark.parametrize("cell, expected", cell_names_data)
def test_cell_to_name(cell, expected):
    assert tools.cell_to_name(cell) == expected


@pytest.mark.parametrize("expected, name", cell_names_data)
def test_name_to_cell(name, expected):
    assert tools.name_to_cell(name) == expected


@pytest.mark.parametrize("name", ["AA", "AA-2", "XX-1"])
def test_invalid_cell_names(name):
    with pytest.raises(ValueError):
        tools.name_to_cell(name)


def test_subgroup_code():
    assert tools.subgroup_code("AfricanAmerican") == "AA"
    assert tools.subgroup_code("C") == "C"
    with pytest.raises(ValueError):
        tools.subgroup_code("Martian")


def test_all_cells():
    assert tools.all_cells() == [("C", 0), ("C", 1), ("AA", 0), ("AA", 1)]


def test_file_digest(tmpdir):
    path = tmpdir.join("data.txt")
    path.write("some content")
    expected = hashlib.sha256(b"some content").hexdigest()
    assert tools.file_digest(str(path)) == expected


def test_human_duration():
    assert tools.human_duration(0.85) == "850ms"
    assert tools.human_duration(12.34) == "12.3s"
    assert tools.human_duration(245) == "4min 05s"
    assert tools.human_duration(119.6) == "2min 00s"
    assert tools.human_duration(179.5) == "3min 00s"


def test_did_you_mean():
    assert "traversal" in tools.did_you_mean("travrsal", ["traversal", "gan", "seed"])


def test_as_float_list():
    assert tools.as_float_list([[1, 2], [3, 4]]) == [1.0, 2.0, 3.0, 4.0]
