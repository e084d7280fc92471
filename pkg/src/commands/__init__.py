"""Command implementations behind the ctc-detector subcommands."""
