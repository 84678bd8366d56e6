import os
import sys
import logging
from dotenv import load_dotenv

# Add src to the Python path so that `models` and `utils` import as top-level packages
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

# Load environment variables
load_dotenv()


def main():
    """
    Run the sketch command-line tool.

    Arguments are passed through, e.g. ``python run.py realize fixtures/term2.sk``.
    """
    try:
        import app
        code, output = app.run_command(sys.argv[1:])
        sys.stdout.write(output)
        sys.exit(code)
    except SystemExit:
        raise
    except Exception as e:
        logging.error(f"Error running command: {str(e)}")
        sys.exit(2)


if __name__ == "__main__":
    main()
