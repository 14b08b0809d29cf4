#!/usr/bin/env python3
"""Regenerate configs/desk.toml and configs/paper.toml from the built-in
profiles (the unit test asserts the files stay in sync)."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from holofusion.scenario import desk_profile, paper_profile, save_config

root = Path(__file__).resolve().parent.parent
save_config(desk_profile(), root / "configs" / "desk.toml")
save_config(paper_profile(), root / "configs" / "paper.toml")
print("wrote configs/desk.toml and configs/paper.toml")
