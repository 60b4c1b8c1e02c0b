"""Regenerate ``src/corelab/fixtures/*.json`` from ``corelab.catalog``.

Each ``expect`` block records claimed example values; the CLI checks them
and exits 2 when one does not hold.

    python3 tools/build_fixtures.py [--out DIR]
"""
from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from corelab import catalog
from corelab.io import dumps, encode_algebra, encode_rep
from corelab.kgraphs import ThetaKGraph
from corelab.reps import KGraphRep

OUT = Path(__file__).resolve().parents[1] / "src" / "corelab" / "fixtures"


def _basis(n: int, idx) -> list:
    e = np.eye(n)
    return [[[float(x), 0.0] for x in e[i]] for i in idx]


def non_confluent_theta() -> KGraphRep:
    """k = 3, m = (2, 2, 2): pairwise bijections that are not confluent on
    three-color words (found by random search, see tests).  The zero rep on
    C satisfies any commutation relation trivially."""
    t12 = {(0, 0): (1, 0), (0, 1): (0, 0), (1, 0): (0, 1)}
    t13 = {(0, 0): (1, 0), (0, 1): (0, 0), (1, 0): (1, 1), (1, 1): (0, 1)}
    t23 = {(1, 0): (1, 1), (1, 1): (1, 0)}
    g = ThetaKGraph(3, (2, 2, 2), {(0, 1): t12, (0, 2): t13, (1, 2): t23})
    z = np.zeros((1, 1))
    return KGraphRep(g, 1, ((z, z), (z, z), (z, z)))


def fixtures() -> dict[str, dict]:
    r2 = 1 / np.sqrt(2)
    out = {}
    out["atomic_flip"] = encode_rep(catalog.atomic_flip(), "atomic_flip", {
        "commutation": True, "fully_coisometric": True, "vhat_dim": 4,
        "wm_1,1_equal": True, "wm_1,0_equal": True, "wm_0,1_equal": True})
    npi_claims = {
        "fully_coisometric": True, "doubly_commuting": True,
        "vhat_dim": 8, "color1_vhat_span": _basis(8, [0, 2, 4, 6]), "wm_1,0_dim": 4}
    out["not_partially_iso"] = encode_rep(catalog.not_partially_iso("v_major"), "not_partially_iso",
                                          npi_claims)
    out["not_partially_iso"]["labels"] = {"ordering": "v_major", "canonical": True}
    out["not_partially_iso_alt_order"] = encode_rep(catalog.not_partially_iso("w_major"),
                                                    "not_partially_iso_alt_order", npi_claims)
    out["not_partially_iso_alt_order"]["labels"] = {"ordering": "w_major", "canonical": False}
    out["not_doubly_commuting"] = encode_rep(catalog.not_doubly_commuting(), "not_doubly_commuting", {
        "fully_coisometric": True, "doubly_commuting": False,
        "vhat_dim": 2, "vhat_span": _basis(3, [0, 1])})
    out["fc_algebra"] = encode_algebra(
        catalog.fc_algebra_generators(), "fc_algebra",
        {"candidates_minimal": [True, True], "non_unique": True},
        candidates=[np.array([[1.0], [0.0]]), np.array([[r2], [r2]])])
    for n in (1, 2, 3):
        out[f"loops_{n}"] = encode_rep(catalog.loops(n), f"loops_{n}", {
            "fully_coisometric": True, "alpha": 0 if n == 1 else n - 1})
    out["three_cycle"] = encode_rep(catalog.three_cycle(), "three_cycle", {
        "isometric": True, "fully_coisometric": True, "alpha": 0})
    out["theta_k3_non_confluent"] = encode_rep(non_confluent_theta(), "theta_k3_non_confluent",
                                               {"theta_valid": False})
    return out


def main() -> None:
    ap = argparse.ArgumentParser(description="regenerate the shipped fixtures")
    ap.add_argument("--out", type=Path, default=OUT)
    out = ap.parse_args().out
    out.mkdir(parents=True, exist_ok=True)
    for name, doc in fixtures().items():
        (out / f"{name}.json").write_text(dumps(doc), encoding="utf-8")
        print(f"wrote {name}.json")


if __name__ == "__main__":
    main()
