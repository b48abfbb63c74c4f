"""Pipeline script language: parsing, formatting, and execution.

Grammar (normative; documented with examples in docs/script-language.md):

    program    := (command terminator?)*
    command    := IDENT '(' arglist? ')'
    arglist    := arg (',' arg)*
    arg        := IDENT ':' value
    value      := STRING | NUMBER | 'true' | 'false' | '[' value (',' value)* ']'
    terminator := ';'

Strings are double-quoted with backslash escapes; '#' starts a line comment;
whitespace and line breaks are insignificant outside strings. Command names
are case-sensitive. Execution is strictly sequential and halts on the first
error, leaving the workspace exactly as the last successful command left it.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path

from . import dedupe, exports, spectra, workspace as store
from .errors import RpyscopeError
from .ingest import ImportConfig, YearWindow, import_file
from .workspace import Workspace


class ScriptSyntaxError(RpyscopeError):
    def __init__(self, message: str, line: int, column: int, excerpt: str):
        self.line = line
        self.column = column
        self.excerpt = excerpt
        caret = " " * (column - 1) + "^"
        super().__init__(f"line {line}, column {column}: {message}\n    {excerpt}\n    {caret}")


class ScriptRuntimeError(RpyscopeError):
    def __init__(self, message: str, command: str, line: int, io_error: bool = False):
        self.command = command
        self.line = line
        self.io_error = io_error
        super().__init__(f"{command} (line {line}): {message}")


Value = str | int | float | bool | list


@dataclass
class Command:
    name: str
    args: dict[str, Value]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass
class ScriptProgram:
    commands: tuple[Command, ...]
    source: str = field(default="", compare=False)


# ---------------------------------------------------------------------------
# Lexer

_PUNCT = {"(": "LPAREN", ")": "RPAREN", "[": "LBRACKET", "]": "RBRACKET",
          ",": "COMMA", ":": "COLON", ";": "SEMI"}

_ESCAPES = {'"': '"', "\\": "\\", "/": "/", "n": "\n", "t": "\t", "r": "\r"}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


class _Lexer:
    def __init__(self, source: str):
        self.source = source
        self.lines = source.splitlines() or [""]
        self.pos = 0
        self.line = 1
        self.column = 1

    def error(self, message: str, line: int | None = None, column: int | None = None):
        line = line or self.line
        column = column or self.column
        excerpt = self.lines[line - 1] if line - 1 < len(self.lines) else ""
        raise ScriptSyntaxError(message, line, column, excerpt)

    def _advance(self, ch: str):
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1

    def tokens(self) -> list[_Token]:
        out = []
        src = self.source
        while self.pos < len(src):
            ch = src[self.pos]
            if ch in " \t\r\n":
                self._advance(ch)
                continue
            if ch == "#":
                while self.pos < len(src) and src[self.pos] != "\n":
                    self._advance(src[self.pos])
                continue
            if ch in _PUNCT:
                out.append(_Token(_PUNCT[ch], ch, self.line, self.column))
                self._advance(ch)
                continue
            if ch == '"':
                out.append(self._string())
                continue
            if ch.isdigit() or (ch == "-" and self.pos + 1 < len(src) and src[self.pos + 1].isdigit()):
                out.append(self._number())
                continue
            if ch.isalpha() or ch == "_":
                out.append(self._ident())
                continue
            self.error(f"unexpected character {ch!r}")
        out.append(_Token("EOF", "", self.line, self.column))
        return out

    def _string(self) -> _Token:
        line, column = self.line, self.column
        self._advance('"')
        chars = []
        while True:
            if self.pos >= len(self.source):
                self.error("unterminated string", line, column)
            ch = self.source[self.pos]
            if ch == "\n":
                self.error("unterminated string (line break inside quotes)", line, column)
            if ch == '"':
                self._advance(ch)
                return _Token("STRING", "".join(chars), line, column)
            if ch == "\\":
                self._advance(ch)
                if self.pos >= len(self.source):
                    self.error("unterminated escape", line, column)
                esc = self.source[self.pos]
                if esc not in _ESCAPES:
                    self.error(f"unknown escape \\{esc}")
                chars.append(_ESCAPES[esc])
                self._advance(esc)
                continue
            chars.append(ch)
            self._advance(ch)

    def _number(self) -> _Token:
        line, column = self.line, self.column
        start = self.pos
        if self.source[self.pos] == "-":
            self._advance("-")
        while self.pos < len(self.source) and self.source[self.pos].isdigit():
            self._advance(self.source[self.pos])
        if self.pos < len(self.source) and self.source[self.pos] == ".":
            self._advance(".")
            if self.pos >= len(self.source) or not self.source[self.pos].isdigit():
                self.error("digits expected after decimal point")
            while self.pos < len(self.source) and self.source[self.pos].isdigit():
                self._advance(self.source[self.pos])
        return _Token("NUMBER", self.source[start : self.pos], line, column)

    def _ident(self) -> _Token:
        line, column = self.line, self.column
        start = self.pos
        while self.pos < len(self.source) and (
            self.source[self.pos].isalnum() or self.source[self.pos] == "_"
        ):
            self._advance(self.source[self.pos])
        return _Token("IDENT", self.source[start : self.pos], line, column)


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.lines = source.splitlines() or [""]
        self.toks = _Lexer(source).tokens()
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def next(self) -> _Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: _Token):
        excerpt = self.lines[tok.line - 1] if tok.line - 1 < len(self.lines) else ""
        raise ScriptSyntaxError(message, tok.line, tok.column, excerpt)

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            self.error(f"expected {what}, got {shown!r}", tok)
        return tok

    def program(self) -> ScriptProgram:
        commands = []
        while self.peek().kind != "EOF":
            commands.append(self.command())
            if self.peek().kind == "SEMI":
                self.next()
        return ScriptProgram(commands=tuple(commands), source=self.source)

    def command(self) -> Command:
        name_tok = self.expect("IDENT", "a command name")
        self.expect("LPAREN", "'(' after command name")
        args: dict[str, Value] = {}
        if self.peek().kind != "RPAREN":
            while True:
                key_tok = self.expect("IDENT", "an argument name")
                if key_tok.text in args:
                    self.error(f"duplicate argument {key_tok.text!r}", key_tok)
                self.expect("COLON", "':' after argument name")
                args[key_tok.text] = self.value()
                if self.peek().kind == "COMMA":
                    self.next()
                    continue
                break
        self.expect("RPAREN", "')' to close the argument list")
        return Command(name=name_tok.text, args=args, line=name_tok.line, column=name_tok.column)

    def value(self) -> Value:
        tok = self.next()
        if tok.kind == "STRING":
            return tok.text
        if tok.kind == "NUMBER":
            return float(tok.text) if "." in tok.text else int(tok.text)
        if tok.kind == "IDENT":
            if tok.text == "true":
                return True
            if tok.text == "false":
                return False
            self.error(f"unexpected identifier {tok.text!r} in value position", tok)
        if tok.kind == "LBRACKET":
            items = []
            if self.peek().kind == "RBRACKET":
                self.error("empty lists are not allowed", self.peek())
            while True:
                items.append(self.value())
                nxt = self.next()
                if nxt.kind == "COMMA":
                    continue
                if nxt.kind == "RBRACKET":
                    return items
                self.error("expected ',' or ']' in list", nxt)
        self.error(f"expected a value, got {tok.text or 'end of input'!r}", tok)


def parse_script(source: str) -> ScriptProgram:
    """Parse pipeline script text into an AST with line/column spans."""
    return _Parser(source).program()


def _format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        escaped = escaped.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
        return f'"{escaped}"'
    if isinstance(value, list):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return repr(value)


def format_script(prog: ScriptProgram) -> str:
    """Canonical pretty-printing; stable under parse/format round trips."""
    lines = []
    for cmd in prog.commands:
        args = ", ".join(f"{k}: {_format_value(v)}" for k, v in cmd.args.items())
        lines.append(f"{cmd.name}({args})")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Execution

@dataclass
class CommandResult:
    name: str
    line: int
    detail: str
    duration: float = field(default=0.0, compare=False)


@dataclass
class RunReport:
    results: list[CommandResult] = field(default_factory=list)
    error: ScriptRuntimeError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def render(self) -> str:
        """Deterministic text summary (durations deliberately excluded)."""
        lines = [f"{i:3d}  {r.name:<12s} {r.detail}" for i, r in enumerate(self.results, 1)]
        if self.error is not None:
            lines.append(f"ERROR: {self.error}")
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class ExecutionContext:
    workdir: Path
    workspace: Workspace | None = None
    assignment: dedupe.ClusterAssignment | None = None

    def resolve(self, name: str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.workdir / path


def _arg(cmd: Command, name: str, kind: type, required: bool = True, default=None):
    if name not in cmd.args:
        if required:
            raise ScriptRuntimeError(f"missing required argument {name!r}", cmd.name, cmd.line)
        return default
    value = cmd.args[name]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is int and isinstance(value, bool):
        raise ScriptRuntimeError(f"argument {name!r} must be an integer", cmd.name, cmd.line)
    if not isinstance(value, kind):
        raise ScriptRuntimeError(
            f"argument {name!r} must be of type {kind.__name__}, got {type(value).__name__}",
            cmd.name,
            cmd.line,
        )
    return value


def _window_arg(cmd: Command, name: str) -> YearWindow:
    value = _arg(cmd, name, list)
    if (
        len(value) != 3
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in value[:2])
        or not isinstance(value[2], bool)
    ):
        raise ScriptRuntimeError(
            f"argument {name!r} must be [lo, hi, keep_missing], e.g. [1900, 1995, false]",
            cmd.name,
            cmd.line,
        )
    try:
        return YearWindow(value[0], value[1], value[2])
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc


def _require_workspace(env: ExecutionContext, cmd: Command) -> Workspace:
    if env.workspace is None:
        raise ScriptRuntimeError("no workspace loaded; run importFile or loadFile first",
                                 cmd.name, cmd.line)
    return env.workspace


def _info_detail(ws: Workspace | None) -> str:
    if ws is None:
        return "records=0 cr_mentions=0 variants=0 rpy_span=-"
    i = store.info(ws)
    span = f"{i.rpy_span[0]}-{i.rpy_span[1]}" if i.rpy_span else "-"
    return (
        f"records={i.records} cr_mentions={i.cr_mentions} "
        f"variants={i.distinct_variants} rpy_span={span}"
    )


def _cmd_import(env: ExecutionContext, cmd: Command):
    file = _arg(cmd, "file", str)
    ftype = _arg(cmd, "type", str)
    if ftype != "WOS":
        raise ScriptRuntimeError(f"unsupported import type {ftype!r}; only \"WOS\" is honored",
                                 cmd.name, cmd.line)
    cfg = ImportConfig(
        rpy_window=_window_arg(cmd, "RPY"),
        py_window=_window_arg(cmd, "PY"),
        max_cr_per_record=_arg(cmd, "maxCR", int, required=False, default=0),
    )
    records, report = import_file(env.resolve(file), cfg)
    env.workspace = store.aggregate(records, cfg)
    env.assignment = None
    return _info_detail(env.workspace) + f" (read {report.records_read} records, {report.cr_lines_read} CR lines)"


def _cmd_info(env: ExecutionContext, cmd: Command):
    return _info_detail(env.workspace)


def _cmd_cluster(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    params = dedupe.ClusterParams(
        threshold=_arg(cmd, "threshold", float),
        use_volume=_arg(cmd, "volume", bool, required=False, default=False),
        use_page=_arg(cmd, "page", bool, required=False, default=False),
        use_doi=_arg(cmd, "DOI", bool, required=False, default=False),
    )
    try:
        new_ws, assignment = dedupe.cluster(ws, params)
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    env.workspace = new_ws
    env.assignment = assignment
    multi = sum(1 for c in assignment.clusters if len(c) > 1)
    return f"clusters={len(assignment.clusters)} multi_member={multi}"


def _cmd_merge(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    if env.assignment is None:
        raise ScriptRuntimeError("merge before cluster: no cluster assignment to apply",
                                 cmd.name, cmd.line)
    before = len(ws.variants)
    env.workspace = dedupe.merge(ws, env.assignment)
    env.assignment = None
    after = len(env.workspace.variants)
    return f"variants {before} -> {after} (merged away {before - after})"


def _cmd_remove_cr(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    bounds = _arg(cmd, "N_CR", list)
    if len(bounds) != 2 or not all(isinstance(b, int) and not isinstance(b, bool) for b in bounds):
        raise ScriptRuntimeError("argument 'N_CR' must be [lo, hi]", cmd.name, cmd.line)
    try:
        env.workspace = store.remove_by_ncr(ws, bounds[0], bounds[1])
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    return f"variants {len(ws.variants)} -> {len(env.workspace.variants)}"


def _cmd_save(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    file = _arg(cmd, "file", str)
    store.save_workspace(ws, env.resolve(file))
    return f"saved {file}"


def _cmd_load(env: ExecutionContext, cmd: Command):
    file = _arg(cmd, "file", str)
    env.workspace = store.load_workspace(env.resolve(file))
    env.assignment = None
    return _info_detail(env.workspace)


def _cmd_export(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    file = _arg(cmd, "file", str)
    ftype = _arg(cmd, "type", str)
    if ftype == "CSV_CR":
        exports.write_cr_table(ws, env.resolve(file))
    elif ftype == "CSV_GRAPH":
        try:
            exports.write_graph(ws, env.resolve(file))
        except ValueError as exc:
            raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    else:
        raise ScriptRuntimeError(
            f"unsupported export type {ftype!r}; only \"CSV_CR\" and \"CSV_GRAPH\" are honored",
            cmd.name,
            cmd.line,
        )
    return f"wrote {file} ({ftype})"


def _markers_arg(cmd: Command) -> list[spectra.MarkerSpec]:
    value = cmd.args.get("marker")
    if value is None:
        raise ScriptRuntimeError("missing required argument 'marker'", cmd.name, cmd.line)
    texts = value if isinstance(value, list) else [value]
    markers = []
    for text in texts:
        if not isinstance(text, str):
            raise ScriptRuntimeError("argument 'marker' must be a string or list of strings",
                                     cmd.name, cmd.line)
        try:
            markers.append(spectra.MarkerSpec.from_string(text))
        except ValueError as exc:
            raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    return markers


def _cmd_cocite(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    markers = _markers_arg(cmd)
    mode = _arg(cmd, "mode", str, required=False, default="any")
    try:
        env.workspace = spectra.cocitation_filter(ws, markers, mode)
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    env.assignment = None
    return f"records {len(ws.records)} -> {len(env.workspace.records)}"


def _spectrum_window(env: ExecutionContext, cmd: Command) -> tuple[int, int]:
    ws = _require_workspace(env, cmd)
    lo = _arg(cmd, "from", int, required=False, default=ws.config.rpy_window.lo)
    hi = _arg(cmd, "to", int, required=False, default=ws.config.rpy_window.hi)
    if lo > hi:
        raise ScriptRuntimeError(f"inverted year range {lo}..{hi}", cmd.name, cmd.line)
    return lo, hi


def _cmd_spectrum(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    file = _arg(cmd, "file", str)
    lo, hi = _spectrum_window(env, cmd)
    try:
        exports.write_graph(ws, env.resolve(file), lo, hi)
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    return f"wrote {file} ({hi - lo + 1} years)"


def _cmd_peaks(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    file = _arg(cmd, "file", str)
    min_dev = _arg(cmd, "minDev", float, required=False, default=1.0)
    lo, hi = _spectrum_window(env, cmd)
    points = spectra.spectrum(ws, lo, hi)
    years = spectra.detect_peaks(points, min_dev)
    exports.write_peaks(points, years, env.resolve(file))
    return f"wrote {file} ({len(years)} peaks)"


def _cmd_top_refs(env: ExecutionContext, cmd: Command):
    ws = _require_workspace(env, cmd)
    rpy = _arg(cmd, "rpy", int)
    share = _arg(cmd, "share", float, required=False, default=0.1)
    file = _arg(cmd, "file", str)
    try:
        rows = spectra.top_contributors(ws, rpy, share)
    except ValueError as exc:
        raise ScriptRuntimeError(str(exc), cmd.name, cmd.line) from exc
    Path(env.resolve(file)).write_text(exports.top_refs_csv(rows, rpy), encoding="utf-8", newline="")
    return f"wrote {file} ({len(rows)} references)"


_HANDLERS = {
    "importFile": _cmd_import,
    "info": _cmd_info,
    "cluster": _cmd_cluster,
    "merge": _cmd_merge,
    "removeCR": _cmd_remove_cr,
    "saveFile": _cmd_save,
    "loadFile": _cmd_load,
    "exportFile": _cmd_export,
    # extension commands beyond the core pipeline language:
    "cocite": _cmd_cocite,
    "spectrum": _cmd_spectrum,
    "peaks": _cmd_peaks,
    "topRefs": _cmd_top_refs,
}


def execute(prog: ScriptProgram, env: ExecutionContext) -> RunReport:
    """Run the program's commands in order; halts on the first error.

    A failing command leaves env.workspace exactly as the previous command
    left it. The failure is recorded on the returned report, never raised.
    """
    report = RunReport()
    for cmd in prog.commands:
        handler = _HANDLERS.get(cmd.name)
        started = time.perf_counter()
        try:
            if handler is None:
                raise ScriptRuntimeError(f"unknown command {cmd.name!r}", cmd.name, cmd.line)
            saved_ws, saved_asg = env.workspace, env.assignment
            try:
                detail = handler(env, cmd)
            except Exception:
                env.workspace, env.assignment = saved_ws, saved_asg
                raise
        except ScriptRuntimeError as exc:
            report.error = exc
            return report
        except OSError as exc:
            report.error = ScriptRuntimeError(str(exc), cmd.name, cmd.line, io_error=True)
            return report
        except RpyscopeError as exc:
            report.error = ScriptRuntimeError(str(exc), cmd.name, cmd.line)
            return report
        report.results.append(
            CommandResult(cmd.name, cmd.line, detail, duration=time.perf_counter() - started)
        )
    return report


def run_script_file(path, workdir: Path | None = None) -> RunReport:
    """Parse and execute a script file; paths resolve against its directory."""
    script_path = Path(path)
    source = script_path.read_text(encoding="utf-8")
    prog = parse_script(source)
    env = ExecutionContext(workdir=workdir or script_path.resolve().parent)
    return execute(prog, env)
