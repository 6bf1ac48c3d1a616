from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):

    THREADS: int = 1
    ENUMERATION_BUDGET: int = 2 ** 26
    CERTIFY_BITS: int = 20

    CONST_C: float = 1.0
    CONST_BIG_C: float = 2.0
    CONST_C_PRIME: int = 16

    LOG_LEVEL: str = "INFO"

    model_config = SettingsConfigDict(env_file='.env', env_prefix='EXFORGE_', extra='ignore', env_file_encoding='utf-8')



config = Settings()
