from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field


class LedgerCheck(BaseModel):
    name: str
    lhs: str
    rhs: str
    holds: bool
    waived: bool = False


class ParamPlan(BaseModel):
    model_config = ConfigDict(frozen=True, from_attributes=True)

    profile: str = Field(pattern=r"^(seeded-nm|two-source-nm|multi)$")
    ledger: str = Field(pattern=r"^(strict|structural)$")
    n: int = Field(ge=1)
    k: int = Field(ge=0)
    eps: str
    eps_prime: str
    constants: dict[str, str] = Field(default_factory=dict)
    symbols: dict[str, int] = Field(default_factory=dict)
    checks: list[LedgerCheck] = Field(default_factory=list)

    def __getitem__(self, name: str) -> int:
        return self.symbols[name]

    def constant(self, name: str) -> Fraction:
        return Fraction(self.constants[name])

    @property
    def output_length(self) -> int:
        return self.symbols["out"]

    @property
    def rate(self) -> Fraction:
        return Fraction(self.output_length, 2 * self.n)

    @property
    def waived(self) -> list[LedgerCheck]:
        return [check for check in self.checks if check.waived]
