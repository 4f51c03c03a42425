"""
clean_project.py

Cleans the working tree of an experiment project:
- Removes Python bytecode files
- Deletes logs and temporary files (leftovers of interrupted atomic writes)
- Optionally deletes the results directory (--results)
"""

import argparse
import os
import shutil

# ---------------- Settings ----------------
LOG_DIRS = ["logs"]
RESULTS_DIRS = ["results"]
TMP_EXTENSIONS = [".tmp", ".swp"]
SKIP_DIRS = {".venv", ".git", "examples"}


def _walk(base_dir):
    for root, dirs, files in os.walk(base_dir):
        dirs[:] = [d for d in dirs if d not in SKIP_DIRS]
        yield root, dirs, files


# ---------------- Clear Python bytecode ----------------
def clear_python_cache(base_dir="."):
    print("Clearing __pycache__ directories and .pyc files...")
    for root, dirs, files in _walk(base_dir):
        for dir_name in list(dirs):
            if dir_name in ("__pycache__", ".pytest_cache"):
                dir_path = os.path.join(root, dir_name)
                shutil.rmtree(dir_path)
                dirs.remove(dir_name)
                print(f"Removed {dir_path}")
        for file_name in files:
            if file_name.endswith((".pyc", ".pyo")):
                file_path = os.path.join(root, file_name)
                os.remove(file_path)
                print(f"Removed {file_path}")


# ---------------- Clear log files ----------------
def clear_logs():
    for log_dir in LOG_DIRS:
        if os.path.exists(log_dir):
            for file_name in os.listdir(log_dir):
                file_path = os.path.join(log_dir, file_name)
                if os.path.isfile(file_path):
                    os.remove(file_path)
                    print(f"Removed log file {file_path}")


# ---------------- Clear temporary files ----------------
def clear_temp_files(base_dir="."):
    for root, _, files in _walk(base_dir):
        for file_name in files:
            if any(file_name.endswith(ext) for ext in TMP_EXTENSIONS):
                file_path = os.path.join(root, file_name)
                os.remove(file_path)
                print(f"Removed temp file {file_path}")


# ---------------- Clear results ----------------
def clear_results():
    for results_dir in RESULTS_DIRS:
        if os.path.isdir(results_dir):
            shutil.rmtree(results_dir)
            print(f"Removed results directory {results_dir}")


# ---------------- Main ----------------
def main():
    parser = argparse.ArgumentParser(description="Clean bytecode, logs and temp files")
    parser.add_argument("--results", action="store_true", help="Also delete the results directory")
    args = parser.parse_args()

    print("Cleaning project...")
    clear_python_cache()
    clear_logs()
    clear_temp_files()
    if args.results:
        clear_results()
    print("Project cleaned successfully!")


if __name__ == "__main__":
    main()
