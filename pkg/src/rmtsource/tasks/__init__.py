"""Task implementations behind the rmtsource commands."""
