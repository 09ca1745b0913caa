"""Global tunables shared across the library.

Everything that the algorithms treat as "a constant" lives here so that tests
and the CLI can tighten or relax limits without touching algorithm code.
"""

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Config:
    # Polynomial size bound: objects (graphs, caps, lengths) must fit in
    # size_bound(n).  Expressed as an exponent so callers can reason about it.
    size_exponent: int = 4

    # Hard cap on the h accepted by the (vertex, budget) lightest-path DP.
    hpath_budget_cap: int = 10_000

    # Enumeration cap for the exact oracle's path listing.
    oracle_path_cap: int = 100_000

    # Blocker outer-loop cap factor: the saturate/round loop may run at most
    # blocker_round_factor * h * ceil(log2 n) times before we give up loudly.
    blocker_round_factor: int = 64

    # Multiplier on the MWU inner repetition budget Theta(h log_{1+eps0} n / eps0).
    theta: float = 1.0

    # Significant bits kept when rounding irrational weight updates to dyadics.
    weight_precision_bits: int = 96

    # Cover construction gives up (loudly) past this width factor.
    cover_width_factor: int = 64

    # Degree of the random regular graph underlying power-graph routers.
    router_degree: int = 8

    # Capacity scale-up inside cutmatch: real capacities become ceil(U/phi)*c.
    cutmatch_cap_factor: int = 1

    # Decomposition driver shape parameters (see decompose.py for their roles).
    alpha_s: int = 1
    alpha_phi: int = 1
    epoch_c: float = 0.125
    alpha_report: int = 1

    # Step bound t = s0 used when measuring router quality inside witnesses.
    witness_router_steps: int = 4

    # Worker threads for the deterministic parallel map (1 = serial).
    threads: int = 1

    def size_bound(self, n: int) -> int:
        return max(16, n) ** self.size_exponent

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


DEFAULT = Config()
