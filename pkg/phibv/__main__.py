"""phibv module."""

if __name__ == "__main__":
    from phibv.api.cli import cli

    cli()
