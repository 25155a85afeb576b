import json

import pytest
from fastapi.testclient import TestClient

from ordspace.space import Space, block_system
from ordspace.homeo import identity, invert, to_rules
from ordspace.generators import build_generators
from ordspace.service import app

client = TestClient(app)

W22 = block_system(Space.parse("w^2*2"))
GS = build_generators(W22)


def e_rules():
    return to_rules(GS.shift("e", 1, 2))


class TestClassify:
    def test_basic(self):
        r = client.post("/classify", json={"space": "w^2*2"})
        assert r.status_code == 200
        doc = r.json()
        assert doc["rank"] == "3"
        assert doc["degree"] == 2
        assert doc["hypothesis_ok"] is True
        assert doc["block_system"]["column_tops"] == ["w^2", "w^2*2"]

    def test_limit_capacity_limit(self):
        doc = client.post("/classify", json={"space": "w^(w)"}).json()
        assert doc["hypothesis_ok"] is False
        assert doc["block_system"] is None

    def test_bad_tail(self):
        doc = client.post("/classify", json={"space": "w^3*2+w*3"}).json()
        assert doc["hypothesis_ok"] is False
        assert "block_system_error" in doc

    def test_parse_error(self):
        r = client.post("/classify", json={"space": "zzz"})
        assert r.status_code == 422


class TestHomeo:
    def test_check_valid(self):
        doc = client.post("/homeo/check", json={"rules": e_rules()}).json()
        assert doc["valid"] is True
        assert doc["identity"] is False

    def test_check_invalid(self):
        bad = e_rules()
        bad["singles"] = [{"src": "(0, w]", "dst": "(0, w*2]"}]
        doc = client.post("/homeo/check", json={"rules": bad}).json()
        assert doc["valid"] is False
        assert doc["errors"]

    def test_eval(self):
        doc = client.post(
            "/homeo/eval", json={"rules": e_rules(), "point": "w*2"}
        ).json()
        assert doc["value"] == "w^2 + w*2"

    def test_eval_outside_space(self):
        r = client.post("/homeo/eval", json={"rules": e_rules(), "point": "w^5"})
        assert r.status_code == 422

    def test_compose_with_inverse_is_identity(self):
        inv = client.post("/homeo/invert", json={"rules": e_rules()}).json()["rules"]
        out = client.post("/homeo/compose", json={"rules": [e_rules(), inv]}).json()
        doc = client.post(
            "/homeo/equal",
            json={"first": out["rules"], "second": to_rules(identity(W22.space))},
        ).json()
        assert doc["equal"] is True

    def test_equal_distinguishes(self):
        doc = client.post(
            "/homeo/equal",
            json={"first": e_rules(), "second": to_rules(identity(W22.space))},
        ).json()
        assert doc["equal"] is False


class TestFactorize:
    def test_shift_round_trip(self):
        r = client.post("/factorize", json={"rules": e_rules(), "verify": True})
        assert r.status_code == 200
        doc = r.json()
        assert doc["verified"] is True
        kinds = [l["kind"] for l in doc["certificate"]["letters"]]
        assert kinds == ["e"]

    def test_non_G_needs_reduce(self):
        from ordspace.generators import column_swap

        sw = to_rules(column_swap(W22, 1, 2))
        r = client.post("/factorize", json={"rules": sw})
        assert r.status_code == 409
        r = client.post("/factorize", json={"rules": sw, "reduce": True, "verify": True})
        assert r.status_code == 200
        assert r.json()["reduction"]

    def test_corrupted_certificate_rejected(self):
        doc = client.post(
            "/factorize", json={"rules": e_rules(), "verify": True}
        ).json()
        cert = doc["certificate"]
        cert["letters"][0]["sign"] = -cert["letters"][0]["sign"]
        r = client.post(
            "/factorize", json={"rules": e_rules(), "certificate": cert}
        )
        assert r.status_code == 409

    def test_intact_certificate_verifies(self):
        cert = client.post(
            "/factorize", json={"rules": e_rules()}
        ).json()["certificate"]
        r = client.post("/factorize", json={"rules": e_rules(), "certificate": cert})
        assert r.status_code == 200
        assert r.json()["verified"] is True


class TestDistortion:
    def test_run(self):
        r = client.post(
            "/distortion", json={"space": "w^3", "n": 2, "window": 4, "seed": 5}
        )
        assert r.status_code == 200
        doc = r.json()
        assert doc["ok"] is True
        assert [rep["word_length"] for rep in doc["reports"]] == [4, 8, 12]

    def test_parameter_error(self):
        r = client.post(
            "/distortion", json={"space": "w^3", "n": 8, "window": 2, "seed": 0}
        )
        assert r.status_code == 422

    def test_scene_error(self):
        r = client.post(
            "/distortion", json={"space": "w^2", "n": 1, "window": 2, "seed": 0}
        )
        assert r.status_code == 422


class TestAudit:
    def test_random_samples_clean(self):
        r = client.post(
            "/audit", json={"space": "w^2*2", "depth": 6, "count": 20, "seed": 1}
        )
        assert r.status_code == 200
        doc = r.json()
        assert doc["ok"] is True
        assert doc["K"] >= 1

    def test_squared_variant(self):
        doc = client.post(
            "/audit",
            json={"space": "w^2*2", "depth": 6, "count": 10, "squared": True},
        ).json()
        assert doc["ok"] is True
        assert doc["metric"].endswith("squared")

    def test_explicit_samples(self):
        from ordspace.ordinal import parse_ordinal as P
        from ordspace.space import ClopenInterval
        from ordspace.generators import span_swap

        sw = to_rules(
            span_swap(
                W22.space,
                [(ClopenInterval(P("0"), P("1")), ClopenInterval(P("1"), P("2")))],
            )
        )
        word = [sw, sw]
        r = client.post(
            "/audit", json={"space": "w^2*2", "depth": 4, "samples": [word]}
        )
        # the composite is the identity: length-2 word at distance 0
        assert r.status_code == 200
        doc = r.json()
        assert doc["ok"] is True
        assert doc["samples"] == [{"word_length": 2, "rho": 0}]
