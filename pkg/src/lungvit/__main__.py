# SPDX-License-Identifier: MIT
from lungvit.cli import main

raise SystemExit(main())
