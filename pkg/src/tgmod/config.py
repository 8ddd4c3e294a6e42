from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class WorkbenchConfig:
    """Knobs shared by every construction and search.

    ``element_budget`` caps the carrier size of any constructed object,
    ``search_budget`` caps candidate counts in enumerations and lifting
    searches.  Every report embeds the config it ran under.
    """

    strict_zero: bool = True
    truncation: int = 3
    element_budget: int = 4096
    search_budget: int = 10**7
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("truncation", "element_budget", "search_budget", "workers"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


DEFAULT = WorkbenchConfig()
