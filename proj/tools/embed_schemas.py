# Copyright 2026 The texcorpus Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Rewrites the embedded schema constants in include/texcorpus/schema.hpp
from schemas/*.schema.json. Run after editing a schema."""

import pathlib
import re

ROOT = pathlib.Path(__file__).resolve().parent.parent
HEADER = ROOT / "include" / "texcorpus" / "schema.hpp"
CONSTANTS = {
    "kPaperDocumentSchema": "paper_document",
    "kDescSchema": "desc",
    "kParaSchema": "para",
    "kStatsSchema": "stats",
    "kLogsSchema": "logs",
}


def main():
    text = HEADER.read_text()
    for const, name in CONSTANTS.items():
        body = (ROOT / "schemas" / f"{name}.schema.json").read_text()
        pattern = re.compile(
            r'(inline constexpr std::string_view ' + const + r' = R"json\().*?(\)json";)', re.S)
        text, n = pattern.subn(lambda m: m.group(1) + body + m.group(2), text)
        if n != 1:
            raise SystemExit(f"{const} not found in {HEADER}")
    HEADER.write_text(text)


if __name__ == "__main__":
    main()
