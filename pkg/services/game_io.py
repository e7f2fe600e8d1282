# services/game_io.py - Game files
import json
from pathlib import Path
from typing import Union

from errors import GameValidationError
from models.schemas import parse_game
from replicator.game_model import Game


def load_game(path: Union[str, Path]) -> Game:
    """Read a game JSON file; any defect is reported as a GameValidationError."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise GameValidationError("game file is readable", str(e))
    except json.JSONDecodeError as e:
        raise GameValidationError("game file is valid JSON", str(e))
    return parse_game(data)
