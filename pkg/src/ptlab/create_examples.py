# -*- coding: utf-8 -*-
"""
Writes ready-to-run example configurations for the standard scenarios.
This helps make the project runnable out-of-the-box.
"""
import json
import math
from pathlib import Path
from typing import Any, Dict

SUBDIR = "ptlab_examples"
# Maximum of |J_1|, the strongest effective tunneling at l = 1
KAPPA_PEAK = 1.8412
GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def _tone(kappa: float, p: int = 1, q: int = 1, phi: float = 0.0) -> Dict[str, Any]:
    return {"kappa": kappa, "phi": phi, "rational": [p, q]}


def _chain(n_sites: int, gammas) -> Dict[str, Any]:
    return {"n_sites": n_sites, "tunnelings": [1.0] * (n_sites - 1), "gammas": list(gammas),
            "boundary": "open"}


EXAMPLES: Dict[str, Dict[str, Any]] = {
    "dimer_spectrum.json": {
        "scenario": "spectrum",
        "lattice": _chain(2, [0.1, -0.1]),
        "modulation": {"l": 1, "omega0": 10.0, "tones": [_tone(KAPPA_PEAK)]},
    },
    "dimer_phase_diagram.json": {
        "scenario": "phase_diagram",
        "lattice": _chain(2, [1.0, -1.0]),
        "modulation": {"l": 1, "omega0": 10.0, "tones": [_tone(0.0)]},
        "scan": {"kappa": {"min": 0.0, "max": 4.0, "points": 400},
                 "gamma_sq": {"min": 0.0, "max": 0.4, "points": 400}},
    },
    "chain_kappa_scan.json": {
        "scenario": "scan_kappa",
        "lattice": _chain(16, [0.1 * (-1) ** n for n in range(1, 17)]),
        "modulation": {"l": 1, "omega0": 10.0, "tones": [_tone(0.0)]},
        "scan": {"kappa": {"min": 0.0, "max": 4.0, "points": 401}},
    },
    "dimer_threshold.json": {
        "scenario": "threshold",
        "lattice": _chain(2, [1.0, -1.0]),
        "modulation": {"l": 1, "omega0": 10.0, "tones": [_tone(KAPPA_PEAK)]},
        "threshold": {"gamma_max": 1.0},
        "tolerances": {"threshold_tol": 1e-9},
    },
    "trimer_threshold.json": {
        "scenario": "threshold",
        "lattice": _chain(3, [1.0, 0.0, -1.0]),
        "modulation": {"l": 1, "omega0": 10.0, "tones": [_tone(KAPPA_PEAK)]},
        "threshold": {"gamma_max": 1.5},
    },
    "pseudo_pt_propagation.json": {
        "scenario": "propagate",
        "lattice": _chain(2, [0.1, -0.1]),
        "modulation": {"l": 1, "omega0": 50.0, "tones": [_tone(KAPPA_PEAK)]},
        "propagation": {"z_end": 2.0 * math.pi, "steps": 25600, "stride": 256, "initial": {"site": 1}},
    },
    "bichromatic_coupling.json": {
        "scenario": "effective_coupling",
        "lattice": _chain(2, [0.0, 0.0]),
        "modulation": {"l": 1, "omega0": 10.0,
                       "tones": [_tone(1.0), {"kappa": 1.0, "phi": 0.0, "irrational": GOLDEN_RATIO}]},
        "averaging": {"window_periods": 500, "steps_per_period": 256},
    },
}


def create_example_configs(base_dir: Path) -> tuple[bool, str, str]:
    """
    Writes the example configurations into a 'ptlab_examples' subdirectory
    of the given base directory.

    Args:
        base_dir: The directory in which to create the 'ptlab_examples' folder.

    Returns:
        A tuple containing:
        - bool: True on success, False on failure.
        - str: A message detailing the outcome.
        - str: The examples directory on success, else an empty string.
    """
    examples_dir = base_dir / SUBDIR

    try:
        examples_dir.mkdir(parents=True, exist_ok=True)

        for filename, document in EXAMPLES.items():
            with open(examples_dir / filename, "w", encoding="utf-8") as f:
                f.write(json.dumps(document, indent=2) + "\n")

        message = f"Successfully created example configurations in:\n{examples_dir}"
        return True, message, str(examples_dir)

    except (IOError, OSError) as e:
        message = f"Error creating example configurations: {e}"
        return False, message, ""
