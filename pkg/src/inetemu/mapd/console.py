"""Interactive console bridge into live containers."""

from __future__ import annotations

import asyncio

from ..errors import NodeNotRunning


class ConsoleBridge:
    """Runs a shell inside a container and pumps bytes both ways."""

    def __init__(self, containerName: str, shell: str = "/bin/sh"):
        self.containerName = containerName
        self.shell = shell
        self.proc: asyncio.subprocess.Process | None = None

    async def start(self):
        try:
            self.proc = await asyncio.create_subprocess_exec(
                "docker",
                "exec",
                "-i",
                self.containerName,
                self.shell,
                stdin=asyncio.subprocess.PIPE,
                stdout=asyncio.subprocess.PIPE,
                stderr=asyncio.subprocess.STDOUT,
            )
        except (OSError, ValueError) as e:
            raise NodeNotRunning(f"cannot exec into {self.containerName}: {e}") from e
        return self

    async def write(self, data: bytes):
        if self.proc is None or self.proc.stdin is None:
            raise NodeNotRunning(f"console to {self.containerName} is not open")
        self.proc.stdin.write(data)
        await self.proc.stdin.drain()

    async def read(self, n: int = 4096) -> bytes:
        if self.proc is None or self.proc.stdout is None:
            raise NodeNotRunning(f"console to {self.containerName} is not open")
        return await self.proc.stdout.read(n)

    async def close(self):
        if self.proc is not None and self.proc.returncode is None:
            self.proc.kill()
            await self.proc.wait()

    async def pumpToWebsocket(self, websocket):
        try:
            while True:
                data = await self.read()
                if not data:
                    break
                await websocket.send_text(data.decode(errors="replace"))
        except Exception:
            pass

    async def pumpFromWebsocket(self, websocket):
        try:
            while True:
                text = await websocket.receive_text()
                await self.write(text.encode())
        except Exception:
            pass
