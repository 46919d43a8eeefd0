"""Main application entry point."""

import sys
from typing import Optional, Sequence

from .cli import build_parser
from .cli.schemas import ErrorDetail, ErrorResponse
from .core.config import get_settings
from .core.errors import CohRadarError
from .core.logging import get_logger, setup_logging

logger = get_logger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the process exit code.

    Failures are reported on stderr as an ErrorResponse JSON document.
    """
    settings = get_settings()
    args = build_parser().parse_args(argv)
    setup_logging(settings.log_level, quiet=args.quiet)
    try:
        args.handler(args)
    except CohRadarError as exc:
        logger.debug("Command failed code=%s", exc.code, exc_info=settings.debug)
        response = ErrorResponse(
            error=ErrorDetail(code=exc.code, message=exc.message, details=exc.details)
        )
        print(response.model_dump_json(), file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
