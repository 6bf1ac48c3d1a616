from pydantic import BaseModel, Field


class SuiteResult(BaseModel):
    construction: str
    params: dict[str, int | str] = Field(default_factory=dict)
    sources: list[str] = Field(default_factory=list)
    tamperers: list[str] = Field(default_factory=list)
    sd: str = "0"
    sd_float: float = 0.0
    bound: str = ""
    passed: bool

    class Config:
        from_attributes = True


class VerifyReport(BaseModel):
    suite: str
    budget: int
    results: list[SuiteResult] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)
