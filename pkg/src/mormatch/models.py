"""Reduced-order models ``xi' = F xi + G v, psi = H xi``."""

from dataclasses import dataclass, field

import numpy as np

from mormatch.lti import StateSpace

__all__ = ['ReducedModel']


@dataclass(frozen=True, eq=False)
class ReducedModel:
    """A model ``(F, G, H)`` plus a provenance record.

    ``provenance`` names the producing method and its parameters;
    ``projectors`` keeps the ``(P, Q)`` pair when the model came from a
    projection.
    """

    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    provenance: dict = field(default_factory=dict)
    projectors: object = None

    def __post_init__(self):
        sys = StateSpace(self.F, self.G, self.H)
        object.__setattr__(self, 'F', sys.A)
        object.__setattr__(self, 'G', sys.B)
        object.__setattr__(self, 'H', sys.C)
        object.__setattr__(self, '_system', sys)

    @property
    def r(self):
        return self.F.shape[0]

    @property
    def system(self):
        """The model as a :class:`~mormatch.lti.StateSpace`."""
        return self._system

    @classmethod
    def from_system(cls, sys, provenance=None):
        return cls(sys.A, sys.B, sys.C, dict(provenance or {}))

    def __repr__(self):
        method = self.provenance.get('method', '?')
        return f'ReducedModel(r={self.r}, method={method!r})'

