"""Point splittings as perturbations, their composition, and bounded searches.

Usage: python demos/perturbation_tour.py
"""

from __future__ import annotations

import time

from trusskit import fixtures
from trusskit.explore import Bounds, compose_perturbations, is_fiber_bundle, search_perturbation, stability, verify_perturbation


def main() -> None:
    one_two, two_three = fixtures.get("split_1_2"), fixtures.get("split_2_3")
    for name, P in (("one to two", one_two), ("two to three", two_three)):
        print(f"{name}: verifies={verify_perturbation(P).verdict.value}, fiber bundle={is_fiber_bundle(P.bundle).value}")
    composite = compose_perturbations(one_two, two_three)
    print("composite equals the one-to-three split:", composite == fixtures.get("split_1_3"))
    print("vanishing point verifies:", verify_perturbation(fixtures.get("vanishing_point")).verdict.value)

    for name, bounds in (("cap", Bounds(3, 16)), ("pt2", Bounds(2, 9))):
        t0 = time.time()
        res = search_perturbation(fixtures.get(name), bounds)
        print(f"search on {name} with {bounds}: {res.status.value} after {res.explored} steps ({time.time() - t0:.1f} s)")

    print("cap stability:", stability(fixtures.get("cap"), Bounds(3, 11)).to_json())


if __name__ == "__main__":
    main()
