"""Configuration file for the program.

This file defines environment variables that are used by the program to steer where results are
written and how many worker processes are used for repetition-level parallelism.

Environment variables:
- SEQGROWTH_OUTPUT_DIR: The directory the CLI writes its results to when no --output is given.
- SEQGROWTH_JOBS: The default number of joblib workers used for repetitions and subsamples.

Note that the environment variables are loaded from a .env file using the `load_dotenv()`
function from the `dotenv` library.
"""

import os

from dotenv import load_dotenv

load_dotenv()

# Define environment variables
OUTPUT_DIR = os.getenv("SEQGROWTH_OUTPUT_DIR", "results")
N_JOBS = int(os.getenv("SEQGROWTH_JOBS", "1"))
