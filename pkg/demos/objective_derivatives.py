"""How each training objective pushes configuration energies around.

Five hypothetical configurations with energies [-1, -0.5, 0, 0.5, 1] and
losses [5, 1, 0, 1, 5]: the middle one is the ground truth, the ones to
its left are currently more probable than it, and loss grows away from
the middle.  For every objective we print the l2-normalized negative
derivative of the per-query objective with respect to each energy; a
positive entry means the objective raises that configuration's energy
(makes it less probable), a negative entry lowers it.
"""
import numpy as np

from crfrank import ObjectiveSpec, energy_derivatives

ENERGIES = [-1.0, -0.5, 0.0, 0.5, 1.0]
LOSSES = [5.0, 1.0, 0.0, 1.0, 5.0]
GT = 2  # 0-based index of the zero-loss configuration

SPECS = [
    ("ML", ObjectiveSpec(kind="ml")),
    ("LA", ObjectiveSpec(kind="la", la_weight=1.0)),
    ("LS", ObjectiveSpec(kind="ls")),
    ("EL", ObjectiveSpec(kind="el")),
    ("KL", ObjectiveSpec(kind="kl", temperature=1.0)),
]


def main():
    print(f"{'config':>10}", "  ".join(f"{i:>8}" for i in range(1, 6)))
    print(f"{'energy':>10}", "  ".join(f"{e:8.2f}" for e in ENERGIES))
    print(f"{'loss':>10}", "  ".join(f"{l:8.2f}" for l in LOSSES))
    print("-" * 64)
    for name, spec in SPECS:
        v = energy_derivatives(spec, ENERGIES, LOSSES, GT)
        print(f"{name:>10}", "  ".join(f"{x:8.4f}" for x in v))
    print()
    print("Reading the table:")
    print(" * ML/LA raise every non-ground-truth energy; LA focuses on high-loss")
    print("   violators.")
    print(" * LS puts essentially all its weight on the single worst violator.")
    print(" * EL lowers the energy of everything with low loss, even configurations")
    print("   already more probable than the ground truth.")
    print(" * KL only lowers the ground truth and the improbable low-loss neighbor.")


if __name__ == "__main__":
    main()
