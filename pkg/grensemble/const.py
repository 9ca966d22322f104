"""Constants used by grensemble."""

PROGRAM_NAME: str = "grensemble"

CONF_THETA: str = "theta"
CONF_MODE: str = "mode"
CONF_TIE_POLICY: str = "tie_policy"
CONF_RESTARTS: str = "restarts"
CONF_MAX_CLIMB_STEPS: str = "max_climb_steps"
CONF_SEED: str = "seed"
CONF_JOBS: str = "jobs"
CONF_AMR_MODE: str = "amr_mode"
CONF_STRICT: str = "strict"

ENV_JOBS: str = "GRENSEMBLE_JOBS"

DEFAULT_THETA: float = 0.5
DEFAULT_RESTARTS: int = 5
DEFAULT_SEED: int = 0

MODE_VALID_AMR: str = "valid_amr"
MODE_STRICT: str = "strict"

TIE_FIRST_PIVOT: str = "first_pivot"
TIE_STABLE_RNG: str = "lowest_index_stable_rng"

# brute force enumeration is only attempted up to this many nodes
BRUTE_FORCE_MAX_NODES: int = 8

UNLABELED_EDGE: str = ":_"
EMPTY_GRAPH_PENMAN: str = "(a / amr-empty)"
