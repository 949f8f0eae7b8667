import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

logger = logging.getLogger(__name__)

# Spin magnitudes the decimation rules were checked against (spin-1/2, 1, 3/2)
VALIDATED_TWO_S = (1, 2, 3)


class ModelFamily(str, Enum):
    HEISENBERG = 'heisenberg'
    BIQUADRATIC = 'biquadratic'


@dataclass(frozen=True)
class ModelKind:
    """
    Hamiltonian selector for the decimation engine.

    HEISENBERG: H = sum J_i S_i . S_{i+1} for spin S = two_s / 2
    BIQUADRATIC: H = sum J_i (S_i . S_{i+1})^2, spin-1 only
    """

    family: ModelFamily
    two_s: int

    def __post_init__(self):
        if self.two_s < 1:
            raise ValueError(f"two_s must be a positive integer, got {self.two_s}")
        if self.family is ModelFamily.BIQUADRATIC and self.two_s != 2:
            raise ValueError("The biquadratic chain is defined for spin-1 only (two_s = 2)")
        if self.family is ModelFamily.HEISENBERG and self.two_s not in VALIDATED_TWO_S:
            logger.warning(f"two_s={self.two_s} is outside the validated set {VALIDATED_TWO_S}")

    @classmethod
    def heisenberg(cls, two_s: int) -> "ModelKind":
        return cls(ModelFamily.HEISENBERG, int(two_s))

    @classmethod
    def biquadratic(cls) -> "ModelKind":
        return cls(ModelFamily.BIQUADRATIC, 2)

    @classmethod
    def from_name(cls, name: str, two_s: Optional[int] = None) -> "ModelKind":
        family = ModelFamily(name.strip().lower())
        if family is ModelFamily.BIQUADRATIC:
            if two_s not in (None, 2):
                raise ValueError(f"The biquadratic chain requires two_s = 2, got {two_s}")
            return cls.biquadratic()
        if two_s is None:
            raise ValueError("two_s is required for the Heisenberg chain")
        return cls.heisenberg(two_s)

    @property
    def spin(self) -> float:
        return self.two_s / 2.0

    @property
    def dimension(self) -> int:
        """Local Hilbert-space dimension D = 2S + 1."""
        return self.two_s + 1

    @property
    def is_heisenberg(self) -> bool:
        return self.family is ModelFamily.HEISENBERG

    @property
    def prefactor(self) -> float:
        """Coefficient of J1 J2 / Omega in the singlet-path recursion."""
        if self.is_heisenberg:
            s = self.spin
            return (2.0 / 3.0) * s * (s + 1.0)
        return 2.0 / 9.0

    @property
    def trio_ratio(self) -> Optional[float]:
        """
        Threshold 3 / [2S(S+1)] in units of Omega, or None when the trio path
        can never trigger (biquadratic chain, or a ratio >= 1 as for spin-1/2).
        """
        if not self.is_heisenberg:
            return None
        s = self.spin
        ratio = 3.0 / (2.0 * s * (s + 1.0))
        return ratio if ratio < 1.0 else None

    @property
    def label(self) -> str:
        if self.is_heisenberg:
            return f"heisenberg-2s{self.two_s}"
        return "biquadratic"
