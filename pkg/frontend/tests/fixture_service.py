"""Start the twin service on a fixture-loaded project for dashboard e2e runs.

Usage: python3 fixture_service.py <project_dir> <port>
Runs all 16 weeks (decisions left open so the inbox has proposals).
"""
import sys

import uvicorn

from sitetwin.service import ProjectStore, create_app

project_dir, port = sys.argv[1], int(sys.argv[2])
store = ProjectStore(project_dir)
twin = store.init_demo()
for week in range(1, 17):
    twin.run_week(week)
store._flush()
uvicorn.run(create_app(store), host="127.0.0.1", port=port, log_level="error")
