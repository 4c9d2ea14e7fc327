# qgeokit/__main__.py
import sys

from dotenv import load_dotenv

from qgeokit.orchestrator import main

load_dotenv()
sys.exit(main())
