from src.cli.run_config import (
    BLOWUP_CONFIG,
    DEMO_CONFIG,
    RunConfig,
    load_config,
    parse_config_text,
    write_demo_config,
)

__all__ = ["BLOWUP_CONFIG", "DEMO_CONFIG", "RunConfig", "load_config", "parse_config_text", "write_demo_config"]
