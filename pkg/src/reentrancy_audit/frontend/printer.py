"""Pretty-printer producing subset source that re-parses to the same tree."""
from __future__ import annotations

from .. import nodes as n

INDENT = "    "

_BINARY_LEVEL = {
    "||": 0, "&&": 1, "==": 2, "!=": 2, "<": 3, "<=": 3, ">": 3, ">=": 3,
    "+": 4, "-": 4, "*": 5, "/": 5, "%": 5,
}
_UNARY_LEVEL = 6
_POSTFIX_LEVEL = 7


def _level(expr: n.Expr) -> int:
    if isinstance(expr, n.Binary):
        return _BINARY_LEVEL[expr.op]
    if isinstance(expr, n.Unary):
        return _UNARY_LEVEL
    return _POSTFIX_LEVEL


def _wrap(expr: n.Expr, min_level: int) -> str:
    text = render_expr(expr)
    return f"({text})" if _level(expr) < min_level else text


def _args(args) -> str:
    return ", ".join(render_expr(a) for a in args)


def render_expr(expr: n.Expr) -> str:
    if isinstance(expr, n.Literal):
        if expr.kind == "bool":
            return "true" if expr.value else "false"
        if expr.kind == "string":
            escaped = str(expr.value).replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return str(expr.value)
    if isinstance(expr, n.Identifier):
        return expr.name
    if isinstance(expr, n.Builtin):
        return expr.name
    if isinstance(expr, n.Member):
        return f"{_wrap(expr.base, _POSTFIX_LEVEL)}.{expr.field}"
    if isinstance(expr, n.Index):
        return f"{_wrap(expr.base, _POSTFIX_LEVEL)}[{render_expr(expr.key)}]"
    if isinstance(expr, n.Binary):
        level = _BINARY_LEVEL[expr.op]
        return f"{_wrap(expr.lhs, level)} {expr.op} {_wrap(expr.rhs, level + 1)}"
    if isinstance(expr, n.Unary):
        return f"{expr.op}{_wrap(expr.operand, _UNARY_LEVEL)}"
    if isinstance(expr, n.ExternalCall):
        callee = _wrap(expr.callee, _POSTFIX_LEVEL)
        if expr.kind is n.CallKind.TRANSFER:
            return f"{callee}.transfer({render_expr(expr.value)})"
        if expr.kind is n.CallKind.SEND:
            return f"{callee}.send({render_expr(expr.value)})"
        return f"{callee}.call{_options(expr.value, expr.gas)}({_args(expr.payload)})"
    if isinstance(expr, n.ContractCall):
        target = _wrap(expr.target, _POSTFIX_LEVEL)
        return f"{target}.{expr.function}{_options(expr.value, expr.gas)}({_args(expr.args)})"
    if isinstance(expr, n.InternalCall):
        return f"{expr.name}({_args(expr.args)})"
    if isinstance(expr, n.Conversion):
        return f"{expr.type_name}({render_expr(expr.expr)})"
    raise TypeError(f"cannot render {expr!r}")


def _options(value, gas) -> str:
    out = ""
    if value is not None:
        out += f".value({render_expr(value)})"
    if gas is not None:
        out += f".gas({render_expr(gas)})"
    return out


def _render_block(body: list[n.Stmt], depth: int) -> list[str]:
    lines = []
    for stmt in body:
        lines.extend(render_stmt(stmt, depth))
    return lines


def render_stmt(stmt: n.Stmt, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(stmt, n.VarDecl):
        init = f" = {render_expr(stmt.init)}" if stmt.init is not None else ""
        return [f"{pad}{stmt.type} {stmt.name}{init};"]
    if isinstance(stmt, n.Assign):
        return [f"{pad}{render_expr(stmt.target)} {stmt.op} {render_expr(stmt.expr)};"]
    if isinstance(stmt, n.Require):
        msg = f", {render_expr(stmt.message)}" if stmt.message is not None else ""
        return [f"{pad}require({render_expr(stmt.cond)}{msg});"]
    if isinstance(stmt, n.If):
        lines = [f"{pad}if ({render_expr(stmt.cond)}) {{"]
        lines += _render_block(stmt.then, depth + 1)
        if stmt.orelse is not None:
            lines.append(f"{pad}}} else {{")
            lines += _render_block(stmt.orelse, depth + 1)
        lines.append(f"{pad}}}")
        return lines
    if isinstance(stmt, n.ExprStmt):
        return [f"{pad}{render_expr(stmt.expr)};"]
    if isinstance(stmt, n.Emit):
        kw = "emit " if stmt.explicit else ""
        return [f"{pad}{kw}{stmt.event}({_args(stmt.args)});"]
    if isinstance(stmt, n.Return):
        if stmt.expr is None:
            return [f"{pad}return;"]
        return [f"{pad}return {render_expr(stmt.expr)};"]
    raise TypeError(f"cannot render {stmt!r}")


def _param(p: n.Param) -> str:
    if p.type is None:
        return p.name
    return f"{p.type} {p.name}" if p.name else str(p.type)


def render_function(fn: n.FunctionDef, contract_name: str, depth: int = 1) -> list[str]:
    pad = INDENT * depth
    params = ", ".join(_param(p) for p in fn.params)
    if fn.is_constructor and not fn.legacy_constructor:
        head = f"constructor({params})"
    elif fn.is_constructor:
        head = f"function {contract_name}({params})"
    elif fn.name is None:
        head = f"function({params})"
    else:
        head = f"function {fn.name}({params})"
    if fn.visibility:
        head += f" {fn.visibility}"
    if fn.payable:
        head += " payable"
    if fn.mutability:
        head += f" {fn.mutability}"
    if fn.returns:
        head += f" returns ({', '.join(_param(p) for p in fn.returns)})"
    lines = [f"{pad}{head} {{"]
    lines += _render_block(fn.body, depth + 1)
    lines.append(f"{pad}}}")
    return lines


def render_contract(contract: n.ContractDef) -> list[str]:
    lines = [f"contract {contract.name} {{"]
    for var in contract.state_vars:
        vis = f" {var.visibility}" if var.visibility != "internal" else ""
        init = f" = {render_expr(var.init)}" if var.init is not None else ""
        lines.append(f"{INDENT}{var.type}{vis} {var.name}{init};")
    for ev in contract.events:
        lines.append(f"{INDENT}event {ev.name}({', '.join(_param(p) for p in ev.params)});")
    for fn in contract.all_functions():
        lines.append("")
        lines += render_function(fn, contract.name)
    lines.append("}")
    return lines


def render(unit: n.SourceUnit) -> str:
    """Render a source unit as subset source text."""
    lines = [f"pragma solidity {unit.pragma};"]
    for imp in unit.imports:
        lines.append(f'import "{imp}";')
    for contract in unit.contracts:
        lines.append("")
        lines += render_contract(contract)
    return "\n".join(lines) + "\n"
