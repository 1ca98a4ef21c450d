import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from conelab.exceptions import ConelabError  # noqa: E402
from conelab.services.analysis import gallery  # noqa: E402

# family -> (n_max, N)
TABLES = {
    "flat": (100, 128),
    "minus-slanted": (100, 128),
    "slab": (100, 128),
    "triple": (52, 128),
    "weak-null": (100, 101),
}


def check_gallery():
    """Rebuild every counterexample table and report pass counts"""
    print("\n🔍 Checking counterexample tables...")

    failures = 0
    for family, (n_max, N) in TABLES.items():
        try:
            rows = gallery(family, n_max, N)
            passed = sum(row.passed for row in rows)
            ok = passed == len(rows)
            print(f"\n{family.upper()}:")
            print(f"Rows: {passed}/{len(rows)} passed")
            print(f"Status: {'✅' if ok else '❌'}")
            failures += not ok
        except ConelabError as e:
            print(f"\n{family.upper()}:")
            print(f"Error: ❌ {str(e)}")
            failures += 1
    return failures


if __name__ == "__main__":
    sys.exit(1 if check_gallery() else 0)
