TOOL_NAME = "fttoplan"
VERSION = "0.1.0"
GENERATOR = f"{TOOL_NAME} {VERSION}"
