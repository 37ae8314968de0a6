"""Config-driven experiments: offline training, online evaluation, sweeps and timing."""
