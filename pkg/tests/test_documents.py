"""
Tests for reading, validating and writing JSON documents.
"""
import json
from fractions import Fraction

import pytest

from app.core.exceptions import BadInverse, SchemaError
from app.core.scalars import ONE, gaussian
from tests.documents import CECH3, HARMONIC, PAIR2, UNIT_SQUARE, write


class TestReading:
    """Files, JSON syntax and document kinds."""

    def test_missing_file(self, documents, tmp_path):
        """Unreadable files are schema errors at the root."""
        with pytest.raises(SchemaError) as exc:
            documents.read(str(tmp_path / "absent.json"))
        assert exc.value.witness == "$"

    def test_bad_json(self, documents, tmp_path):
        """Syntax errors are schema errors."""
        path = tmp_path / "bad.json"
        path.write_text("{\"kind\": ", encoding="utf-8")
        with pytest.raises(SchemaError):
            documents.read(str(path))

    def test_unknown_kind(self, documents):
        """The kind must be one of the document kinds."""
        with pytest.raises(SchemaError) as exc:
            documents.kind_of({"format": 1, "kind": "matrix"})
        assert exc.value.witness == "$.kind"
        assert documents.kind_of(UNIT_SQUARE) == "disk"


class TestGroupoidDocuments:
    """Explicit tables and constructor shorthands."""

    def test_constructor(self, documents):
        """A shorthand document builds the named groupoid."""
        G = documents.decode_groupoid(PAIR2)
        assert (G.n_objects, G.n_arrows) == (2, 4)

    def test_roundtrip_file(self, documents, constructors, tmp_path):
        """Saved tables load back to the same groupoid."""
        G = constructors.named_group("S3")
        path = str(tmp_path / "s3.json")
        documents.save_groupoid(G, path)
        assert documents.load_groupoid(path).tables() == G.tables()
        assert json.loads((tmp_path / "s3.json").read_text())["kind"] == "groupoid"

    def test_bad_triple_path(self, documents, constructors):
        """Malformed compose entries are located by their JSON path."""
        data = documents.encode_groupoid(constructors.pair_groupoid(2))
        data["compose"][3][2] = "x"
        with pytest.raises(SchemaError) as exc:
            documents.decode_groupoid(data)
        assert exc.value.witness == "$.compose[3][2]"

    def test_missing_tables(self, documents):
        """Without a constructor every table is required."""
        with pytest.raises(SchemaError) as exc:
            documents.decode_groupoid({"format": 1, "kind": "groupoid", "n_objects": 1})
        assert exc.value.witness == "$"

    def test_wrong_format(self, documents):
        with pytest.raises(SchemaError) as exc:
            documents.decode_groupoid({**PAIR2, "format": 2})
        assert exc.value.witness == "$.format"

    def test_axiom_violation(self, documents, constructors):
        """Well-formed tables that break an axiom raise the domain error."""
        data = documents.encode_groupoid(constructors.z2_groupoid())
        data["inv"] = [0, 0]
        with pytest.raises(BadInverse):
            documents.decode_groupoid(data)


class TestOtherDocuments:
    """Haar systems, bibundles, elements, disks and sequences."""

    def test_haar(self, documents):
        """Object weights give the normal form; encoded weights reload."""
        haar = documents.decode_haar({"format": 1, "kind": "haar", "groupoid": PAIR2, "u": ["1", "1/2"]})
        assert haar.weights == (Fraction(1), Fraction(1), Fraction(1, 2), Fraction(1, 2))
        assert documents.decode_haar(documents.encode_haar(haar)).weights == haar.weights

    def test_haar_needs_groupoid(self, documents):
        with pytest.raises(SchemaError) as exc:
            documents.decode_haar({"format": 1, "kind": "haar"})
        assert exc.value.witness == "$.groupoid"

    def test_haar_zero_denominator(self, documents):
        """Rationals with zero denominators are rejected."""
        with pytest.raises(SchemaError):
            documents.decode_haar({"format": 1, "kind": "haar", "groupoid": PAIR2, "u": ["1", "1/0"]})

    def test_bibundle(self, documents, tmp_path):
        """Shorthand bibundles validate; saved tables reload."""
        P = documents.decode_bibundle(CECH3)
        path = write(tmp_path, "p.json", documents.encode_bibundle(P))
        assert documents.load_bibundle(path).tables() == P.tables()

    def test_element(self, documents):
        """Gaussian rational coefficients; zeros are dropped."""
        vec = documents.decode_element({"format": 1, "kind": "element", "coefficients": {"0": "1", "2": {"re": "1/2", "im": "-3"}, "3": "0"}})
        assert vec == {0: ONE, 2: gaussian("1/2", "-3")}
        assert documents.decode_element(documents.encode_element(vec)) == vec

    def test_element_rejects_float(self, documents):
        """JSON floats are not exact scalars."""
        with pytest.raises(SchemaError):
            documents.decode_element({"format": 1, "kind": "element", "coefficients": {"0": 0.5}})

    def test_disk_and_sequence(self, documents):
        """Disk and sequence documents decode to rational points."""
        D = documents.decode_disk(UNIT_SQUARE)
        seq = documents.decode_sequence(HARMONIC)
        assert D.generators == ((1, 0), (0, 1))
        assert seq.points[3] == (Fraction(1, 4), 0)
        assert documents.decode_disk(documents.encode_disk(D)) == D
        assert documents.decode_sequence(documents.encode_sequence(seq)) == seq

    def test_disk_coordinate_count(self, documents):
        with pytest.raises(SchemaError):
            documents.decode_disk({**UNIT_SQUARE, "generators": [["1"]]})

    def test_algebra_kinds(self, documents, tmp_path):
        """Groupoid, Haar and field-product documents describe algebras; disks do not."""
        assert documents.load_algebra(write(tmp_path, "g.json", PAIR2)).dim == 4
        assert documents.load_algebra(write(tmp_path, "c.json", {"format": 1, "kind": "field_product", "n": 3})).dim == 3
        with pytest.raises(SchemaError):
            documents.load_algebra(write(tmp_path, "d.json", UNIT_SQUARE))
