class CapExceeded(ValueError):
    """An exhaustive computation would exceed its configured size cap."""


class BudgetExceeded(RuntimeError):
    """A recursion ran past its call budget."""


class NotCoalesced(RuntimeError):
    """Coupling from the past reached its horizon cap without coalescing."""
