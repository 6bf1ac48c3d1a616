from pydantic import BaseModel


class Thresholds(BaseModel):
    """
    Regression pins for the toy-scale verification suites.

    ``flip_flop``, ``adv_cb``, ``snm``, ``nm2`` and ``multi`` are margins: a
    construction passes when its distance is at most that of a random function
    evaluated on the same sources and tamperings, plus the margin. ``lookahead``
    and ``tamper`` bound realized distances directly. None of them are
    asymptotic error bounds.
    """
    flip_flop: float = 0.0625
    adv_cb: float = 0.0625
    snm: float = 0.0625
    nm2: float = 0.0625
    multi: float = 0.0625
    lookahead: float = 0.375
    tamper: float = 0.9
    chi_square_p: float = 0.01
    collision_slack: float = 2.0

    class Config:
        from_attributes = True

    def override(self, pairs: list[str]) -> "Thresholds":
        """
        The override function applies ``name=value`` pairs from the command line.

        :param pairs: list[str]: Entries of the form name=value
        :return: A new thresholds object
        """
        data = self.model_dump()
        for pair in pairs:
            name, _, value = pair.partition("=")
            if name not in data or not value:
                raise ValueError(f"unknown threshold override {pair!r}")
            data[name] = float(value)
        return Thresholds(**data)
