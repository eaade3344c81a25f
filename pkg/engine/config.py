"""Runtime settings read from the environment."""
import os
from dataclasses import dataclass, replace

DEFAULT_BUDGET = 10 ** 6


@dataclass(frozen=True)
class Settings:
    budget: int = DEFAULT_BUDGET
    log_level: str = "WARNING"
    quiet: bool = False

    def override(self, **changes) -> "Settings":
        """Return a copy with every non-None keyword applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _flag(value: str) -> bool:
    return value.strip().lower() in {"1", "true", "yes", "on"}


def load_settings() -> Settings:
    """Build settings from RGCHECK_* environment variables."""
    budget = os.getenv("RGCHECK_BUDGET")
    return Settings(
        budget=int(budget) if budget else DEFAULT_BUDGET,
        log_level=os.getenv("RGCHECK_LOG_LEVEL", "WARNING").upper(),
        quiet=_flag(os.getenv("RGCHECK_QUIET", "")),
    )
