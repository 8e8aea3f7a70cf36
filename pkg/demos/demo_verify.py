"""
Demo: building the example p-groups and checking the rank bounds on them.
The cases are independent and run in a process pool.
"""

import logging

import pgrl
from pgrl.verifier import dihedral_group, quaternion_group


if __name__ == "__main__":

    # optional: printing debug information
    logging.basicConfig(level=logging.INFO)

    names = [
        "example_semidirect_m1_p2",
        "example_semidirect_m2_p2",
        "pattern_n4_p2",
        "pattern_n5_p2",
        "sylow_frattini_n4_p2",
        "d16",
        "jordan_k2_p2",
    ]
    suite = pgrl.sanity_suite(names, processes=4)
    for case in suite["cases"]:
        print()
        print(f"{case['case']}: ok={case['ok']}")
        for c in case["checks"]:
            print(f"  {c['name']}: expected {c['expected']}, measured {c['measured']}")
        for key, value in case["measurements"].items():
            print(f"  {key} = {value}")

    print()
    for name, group in (("D8", dihedral_group(8)), ("Q8", quaternion_group())):
        print(f"{name}: {pgrl.small_group_ranks(group)}")

    print()
    print(f"bounds at k=4, n=6: {pgrl.bound_table(4, 6)}")
