class StepCapExceeded(RuntimeError):
    """A walk ran past the step cap.  Rooting is a.s. finite but unbounded,
    so this signals a slow run or a misconfigured model, never a truncation."""

    def __init__(self, cap, where=""):
        super().__init__(f"step cap {cap} exceeded{' ' + where if where else ''}")
        self.cap = cap


class SamplerConfigError(ValueError):
    """The sampler cannot terminate or is asked for an unsupported model."""
