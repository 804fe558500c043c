"""Base classes for methorious values."""
import logging

from .exceptions import DependentConditions

_log = logging.getLogger(__name__)


class BaseValue:
    """An immutable algebraic value with structural equality.

    Subclasses define `_key` (a hashable canonical tuple) and `render`.
    """
    __slots__ = ()

    def _key(self) -> tuple:
        raise NotImplementedError('Subclass must define _key')

    def render(self) -> str:
        raise NotImplementedError('Subclass must define render')

    def latex(self) -> str:
        return self.render()

    def json(self) -> 'dict|str':
        return self.render()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, self.__class__):
            return NotImplemented
        return self._key() == other._key()

    def __ne__(self, other: object) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self) -> int:
        return hash((self.__class__.__name__, self._key()))

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}({self.render()!r})'


class ConditionList(list):
    """A list of linear functionals kept linearly independent.

    Elements must provide ``coordinates()`` returning a sparse vector.
    Used to assemble boundary-space bases.

    Attributes:
        list_type: The element type the list is comprised of.

    """
    def __init__(self, value_cls: type, strict: bool = True) -> None:
        super().__init__()
        self.list_type = value_cls
        self.strict = strict
        from .algebra.helpers import EchelonBasis
        self._basis = EchelonBasis()

    def add(self, value: BaseValue) -> bool:
        """Add a functional to the end of the list.

        Args:
            value: A valid object according to the list_type.

        Returns:
            True if added, False if a dependent value was skipped
            (non-strict lists only).

        Raises:
            ValueError if the type is invalid.
            DependentConditions if strict and the value is dependent.

        """
        if not isinstance(value, self.list_type):
            raise ValueError(f'Invalid {self.list_type.__name__} definition')
        if not self._basis.add(value.coordinates()):
            if self.strict:
                raise DependentConditions(f'{value} depends on {list(self)}')
            _log.debug('Dropped dependent %s', value)
            return False
        self.append(value)
        return True

    def extend_independent(self, values: list) -> 'ConditionList':
        for value in values:
            self.add(value)
        return self

    def spans(self, value: BaseValue) -> bool:
        """True if the value lies in the span of the list."""
        return self._basis.contains(value.coordinates())

    @property
    def rank(self) -> int:
        return self._basis.rank

    def residual(self, value: BaseValue) -> dict:
        """The coordinates of a value reduced modulo the span of the list."""
        return self._basis.reduce(value.coordinates())
