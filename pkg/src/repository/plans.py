import hashlib
import json
from pathlib import Path

from src.schemas.plans import ParamPlan

PLAN_HASH_BYTES = 8


def plan_json(plan: ParamPlan) -> str:
    """Canonical JSON of a plan: sorted keys, no whitespace."""
    return json.dumps(plan.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def plan_hash(plan: ParamPlan) -> bytes:
    """
    The plan_hash function fingerprints a plan for codeword files.

    :param plan: ParamPlan: The plan
    :return: The 8-byte BLAKE2b digest of the canonical JSON
    """
    return hashlib.blake2b(plan_json(plan).encode("utf-8"), digest_size=PLAN_HASH_BYTES).digest()


def save_plan(plan: ParamPlan, path: Path) -> Path:
    """
    The save_plan function writes a plan as indented JSON.

    :param plan: ParamPlan: The plan to store
    :param path: Path: Destination file
    :return: The path written
    """
    path = Path(path)
    path.write_text(plan.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def load_plan(path: Path) -> ParamPlan:
    return ParamPlan.model_validate_json(Path(path).read_text(encoding="utf-8"))
