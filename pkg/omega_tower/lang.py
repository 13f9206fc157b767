"""Object language: S-expression programs, values and a fuel-bounded interpreter.

Programs have exactly one parameter ``x`` and a single trailing ``return``::

    (fun (x) (block (set n (var x)) (while ...) (return (var n))))

Every statement or expression evaluation costs one unit of fuel. ``apply``
runs another program (given as text) on the same fuel budget; ``verify``
asks a host-supplied oracle and costs a constant.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Iterator, List, Tuple, Union

from . import sexp
from .errors import ParseError
from .sexp import Atom, SList, String

log = logging.getLogger(__name__)

IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")
PARAM = "x"

BINARY_OPS = ("add", "sub", "mul", "lt", "eq", "and", "or", "pair")
UNARY_OPS = ("not", "tobool", "fst", "snd", "ispair")


# ---------------------------------------------------------------- AST


@dataclass(frozen=True)
class NatLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class UnOp:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Verify:
    vdesc: "Expr"
    proof: "Expr"
    program: "Expr"


@dataclass(frozen=True)
class Apply:
    program: "Expr"
    argument: "Expr"


Expr = Union[NatLit, BoolLit, StrLit, Var, BinOp, UnOp, Verify, Apply]


@dataclass(frozen=True)
class Set:
    name: str
    expr: Expr


@dataclass(frozen=True)
class While:
    guard: Expr
    body: Tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Tuple["Stmt", ...]
    orelse: Tuple["Stmt", ...]


Stmt = Union[Set, While, If]


@dataclass(frozen=True)
class Program:
    body: Tuple[Stmt, ...]
    result: Expr
    param: str = PARAM


# ---------------------------------------------------------------- values


@dataclass(frozen=True)
class Nat:
    value: int


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class PairV:
    first: "Value"
    second: "Value"


Value = Union[Nat, Bool, Str, PairV]

TRUE = Bool(True)
FALSE = Bool(False)


# ---------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class Halt:
    value: Value

    @property
    def halted(self) -> bool:
        return True


@dataclass(frozen=True)
class RuntimeFault:
    reason: str

    @property
    def halted(self) -> bool:
        return True


@dataclass(frozen=True)
class OutOfFuel:
    @property
    def halted(self) -> bool:
        return False


RunResult = Union[Halt, RuntimeFault, OutOfFuel]

VerifyOracle = Callable[[str, str, str], bool]


def reject_all(vdesc: str, proof: str, program: str) -> bool:
    return False


# ---------------------------------------------------------------- parsing


def ident_from_sexp(node: sexp.Node) -> str:
    name = sexp.expect_atom(node, "identifier")
    if not IDENT.match(name) or not name.isascii():
        raise ParseError(f"bad identifier '{name}'", node.line, node.column)
    return name


def _expr(node: sexp.Node) -> Expr:
    if not isinstance(node, SList) or node.head() is None:
        raise ParseError("expected expression", node.line, node.column)
    head = node.head()
    args = node.items[1:]
    if head == "nat":
        sexp.expect_list(node, head, 1)
        return NatLit(sexp.expect_nat(args[0]))
    if head == "bool":
        sexp.expect_list(node, head, 1)
        word = sexp.expect_atom(args[0], "true or false")
        if word not in ("true", "false"):
            raise ParseError(f"expected true or false, got '{word}'", args[0].line, args[0].column)
        return BoolLit(word == "true")
    if head == "str":
        sexp.expect_list(node, head, 1)
        return StrLit(sexp.expect_string(args[0], "string"))
    if head == "var":
        sexp.expect_list(node, head, 1)
        return Var(ident_from_sexp(args[0]))
    if head in BINARY_OPS:
        sexp.expect_list(node, head, 2)
        return BinOp(head, _expr(args[0]), _expr(args[1]))
    if head in UNARY_OPS:
        sexp.expect_list(node, head, 1)
        return UnOp(head, _expr(args[0]))
    if head == "verify":
        sexp.expect_list(node, head, 3)
        return Verify(_expr(args[0]), _expr(args[1]), _expr(args[2]))
    if head == "apply":
        sexp.expect_list(node, head, 2)
        return Apply(_expr(args[0]), _expr(args[1]))
    raise ParseError(f"unknown expression '{head}'", node.line, node.column)


def _body(node: sexp.Node) -> Tuple[Stmt, ...]:
    sexp.expect_list(node, "body", what="statement list")
    return tuple(_stmt(item) for item in node.items[1:])


def _stmt(node: sexp.Node) -> Stmt:
    if not isinstance(node, SList) or node.head() is None:
        raise ParseError("expected statement", node.line, node.column)
    head = node.head()
    args = node.items[1:]
    if head == "set":
        sexp.expect_list(node, head, 2)
        return Set(ident_from_sexp(args[0]), _expr(args[1]))
    if head == "while":
        sexp.expect_list(node, head, 2)
        return While(_expr(args[0]), _body(args[1]))
    if head == "if":
        sexp.expect_list(node, head, 3)
        return If(_expr(args[0]), _body(args[1]), _body(args[2]))
    if head == "return":
        raise ParseError("'return' is only allowed as the last statement of the top-level block", node.line, node.column)
    raise ParseError(f"unknown statement '{head}'", node.line, node.column)


def program_from_sexp(node: sexp.Node) -> Program:
    fun = sexp.expect_list(node, "fun", 2, what="program")
    params = fun.items[1]
    if (
        not isinstance(params, SList)
        or len(params.items) != 1
        or not isinstance(params.items[0], Atom)
        or params.items[0].text != PARAM
    ):
        raise ParseError("program must take exactly one parameter (x)", params.line, params.column)
    block = sexp.expect_list(fun.items[2], "block", what="program body")
    stmts = block.items[1:]
    if not stmts:
        raise ParseError("block must end with (return ...)", block.line, block.column)
    last = stmts[-1]
    if not isinstance(last, SList) or last.head() != "return":
        raise ParseError("block must end with (return ...)", last.line, last.column)
    sexp.expect_list(last, "return", 1)
    return Program(tuple(_stmt(s) for s in stmts[:-1]), _expr(last.items[1]))


def parse_program(text: str) -> Program:
    return program_from_sexp(sexp.read(text))


@lru_cache(maxsize=4096)
def parse_program_cached(text: str) -> Program:
    return parse_program(text)


def value_from_sexp(node: sexp.Node) -> Value:
    if not isinstance(node, SList) or node.head() is None:
        raise ParseError("expected value", node.line, node.column)
    head = node.head()
    if head == "pair":
        sexp.expect_list(node, head, 2)
        return PairV(value_from_sexp(node.items[1]), value_from_sexp(node.items[2]))
    if head not in ("nat", "bool", "str"):
        raise ParseError(f"unknown value '{head}'", node.line, node.column)
    lit = _expr(node)
    if isinstance(lit, NatLit):
        return Nat(lit.value)
    if isinstance(lit, BoolLit):
        return Bool(lit.value)
    return Str(lit.value)


def parse_value(text: str) -> Value:
    return value_from_sexp(sexp.read(text))


# ---------------------------------------------------------------- printing


def print_expr(expr: Expr) -> str:
    if isinstance(expr, NatLit):
        return f"(nat {sexp.nat_text(expr.value)})"
    if isinstance(expr, BoolLit):
        return "(bool true)" if expr.value else "(bool false)"
    if isinstance(expr, StrLit):
        return f"(str {sexp.quote(expr.value)})"
    if isinstance(expr, Var):
        return f"(var {expr.name})"
    if isinstance(expr, BinOp):
        return f"({expr.op} {print_expr(expr.left)} {print_expr(expr.right)})"
    if isinstance(expr, UnOp):
        return f"({expr.op} {print_expr(expr.operand)})"
    if isinstance(expr, Verify):
        return f"(verify {print_expr(expr.vdesc)} {print_expr(expr.proof)} {print_expr(expr.program)})"
    if isinstance(expr, Apply):
        return f"(apply {print_expr(expr.program)} {print_expr(expr.argument)})"
    raise TypeError(f"not an expression: {expr!r}")


def _print_body(stmts: Tuple[Stmt, ...]) -> str:
    return "(body" + "".join(" " + print_stmt(s) for s in stmts) + ")"


def print_stmt(stmt: Stmt) -> str:
    if isinstance(stmt, Set):
        return f"(set {stmt.name} {print_expr(stmt.expr)})"
    if isinstance(stmt, While):
        return f"(while {print_expr(stmt.guard)} {_print_body(stmt.body)})"
    if isinstance(stmt, If):
        return f"(if {print_expr(stmt.cond)} {_print_body(stmt.then)} {_print_body(stmt.orelse)})"
    raise TypeError(f"not a statement: {stmt!r}")


def print_program(program: Program) -> str:
    parts = [print_stmt(s) for s in program.body]
    parts.append(f"(return {print_expr(program.result)})")
    return f"(fun ({program.param}) (block {' '.join(parts)}))"


def print_value(value: Value) -> str:
    parts: List[str] = []
    pending: List[Union[Value, str]] = [value]
    while pending:
        item = pending.pop()
        if isinstance(item, str):
            parts.append(item)
        elif isinstance(item, Nat):
            parts.append(f"(nat {sexp.nat_text(item.value)})")
        elif isinstance(item, Bool):
            parts.append("(bool true)" if item.value else "(bool false)")
        elif isinstance(item, Str):
            parts.append(f"(str {sexp.quote(item.value)})")
        elif isinstance(item, PairV):
            pending.extend((")", item.second, " ", item.first, "(pair "))
        else:
            raise TypeError(f"not a value: {item!r}")
    return "".join(parts)


def print_result(result: RunResult) -> str:
    """One-line rendering used by the CLI and reports."""
    if isinstance(result, Halt):
        return f"HALT {print_value(result.value)}"
    if isinstance(result, RuntimeFault):
        return f"ERROR {result.reason}"
    return "OUT-OF-FUEL"


# ---------------------------------------------------------------- traversal


def iter_exprs(expr: Expr) -> Iterator[Expr]:
    yield expr
    if isinstance(expr, BinOp):
        yield from iter_exprs(expr.left)
        yield from iter_exprs(expr.right)
    elif isinstance(expr, UnOp):
        yield from iter_exprs(expr.operand)
    elif isinstance(expr, Verify):
        yield from iter_exprs(expr.vdesc)
        yield from iter_exprs(expr.proof)
        yield from iter_exprs(expr.program)
    elif isinstance(expr, Apply):
        yield from iter_exprs(expr.program)
        yield from iter_exprs(expr.argument)


def iter_stmts(stmts: Tuple[Stmt, ...]) -> Iterator[Stmt]:
    for stmt in stmts:
        yield stmt
        if isinstance(stmt, While):
            yield from iter_stmts(stmt.body)
        elif isinstance(stmt, If):
            yield from iter_stmts(stmt.then)
            yield from iter_stmts(stmt.orelse)


def _stmt_exprs(stmt: Stmt) -> Tuple[Expr, ...]:
    if isinstance(stmt, Set):
        return (stmt.expr,)
    if isinstance(stmt, While):
        return (stmt.guard,)
    return (stmt.cond,)


def iter_program_exprs(program: Program) -> Iterator[Expr]:
    for stmt in iter_stmts(program.body):
        for root in _stmt_exprs(stmt):
            yield from iter_exprs(root)
    yield from iter_exprs(program.result)


def node_count(program: Program) -> int:
    return sum(1 for _ in iter_stmts(program.body)) + sum(1 for _ in iter_program_exprs(program)) + 1


def contains_apply(program: Program) -> bool:
    return any(isinstance(e, Apply) for e in iter_program_exprs(program))


def contains_while(program: Program) -> bool:
    return any(isinstance(s, While) for s in iter_stmts(program.body))


# ---------------------------------------------------------------- evaluation


class _Fault(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


class _Exhausted(Exception):
    pass


def truthiness(value: Value) -> bool:
    if isinstance(value, Bool):
        return value.value
    if isinstance(value, Nat):
        return value.value != 0
    if isinstance(value, Str):
        return value.value != ""
    return True


def values_equal(a: Value, b: Value) -> bool:
    """Structural equality, walked iteratively over pairs."""
    pending = [(a, b)]
    while pending:
        left, right = pending.pop()
        if isinstance(left, PairV) and isinstance(right, PairV):
            pending.append((left.second, right.second))
            pending.append((left.first, right.first))
        elif left != right:
            return False
    return True


class Machine:
    """Evaluator driven by an explicit work stack.

    Expressions, statements and ``apply`` calls push work items instead of
    recursing, so nesting is limited by fuel alone. Each callee runs behind a
    frame marker; a fault inside the callee unwinds to its marker and the call
    evaluates to ``(bool false)``.
    """

    def __init__(self, fuel: int, oracle: VerifyOracle) -> None:
        self.fuel = fuel
        self.oracle = oracle
        self.work: List[tuple] = []
        self.values: List[Value] = []

    def tick(self) -> None:
        if self.fuel <= 0:
            raise _Exhausted()
        self.fuel -= 1

    def call(self, program: Program, argument: Value) -> Value:
        self._push_call(program, argument)
        while self.work:
            step, *operands = self.work.pop()
            try:
                step(*operands)
            except _Fault as fault:
                if not self._unwind(fault):
                    raise
        return self.values.pop()

    def _push_call(self, program: Program, argument: Value) -> None:
        env: Dict[str, Value] = {program.param: argument}
        self.work.append((self._eval, program.result, env))
        self.work.append((self.tick,))
        self._push_block(program.body, env)

    def _push_block(self, stmts: Tuple[Stmt, ...], env: Dict[str, Value]) -> None:
        self.work.extend((self._exec, stmt, env) for stmt in reversed(stmts))

    def _unwind(self, fault: _Fault) -> bool:
        while self.work:
            step, *operands = self.work.pop()
            if step == self._frame:
                del self.values[operands[0] :]
                self.values.append(FALSE)
                log.debug("callee fault %s absorbed as (bool false)", fault.reason)
                return True
        return False

    def _frame(self, height: int) -> None:
        pass

    # statements

    def _exec(self, stmt: Stmt, env: Dict[str, Value]) -> None:
        if isinstance(stmt, Set):
            self.tick()
            self.work.append((self._assign, stmt.name, env))
            self.work.append((self._eval, stmt.expr, env))
        elif isinstance(stmt, While):
            self._loop(stmt, env)
        else:
            self.tick()
            self.work.append((self._branch, stmt, env))
            self.work.append((self._eval, stmt.cond, env))

    def _assign(self, name: str, env: Dict[str, Value]) -> None:
        env[name] = self.values.pop()

    def _loop(self, stmt: While, env: Dict[str, Value]) -> None:
        self.tick()
        self.work.append((self._loop_test, stmt, env))
        self.work.append((self._eval, stmt.guard, env))

    def _loop_test(self, stmt: While, env: Dict[str, Value]) -> None:
        if self._bool(self.values.pop(), "while"):
            self.work.append((self._loop, stmt, env))
            self._push_block(stmt.body, env)

    def _branch(self, stmt: If, env: Dict[str, Value]) -> None:
        taken = self._bool(self.values.pop(), "if")
        self._push_block(stmt.then if taken else stmt.orelse, env)

    # expressions

    @staticmethod
    def _bool(value: Value, op: str) -> bool:
        if not isinstance(value, Bool):
            raise _Fault(f"type-mismatch:{op}")
        return value.value

    @staticmethod
    def _nat(value: Value, op: str) -> int:
        if not isinstance(value, Nat):
            raise _Fault(f"type-mismatch:{op}")
        return value.value

    def _eval(self, expr: Expr, env: Dict[str, Value]) -> None:
        self.tick()
        push = self.work.append
        if isinstance(expr, NatLit):
            self.values.append(Nat(expr.value))
        elif isinstance(expr, BoolLit):
            self.values.append(Bool(expr.value))
        elif isinstance(expr, StrLit):
            self.values.append(Str(expr.value))
        elif isinstance(expr, Var):
            if expr.name not in env:
                raise _Fault(f"unbound:{expr.name}")
            self.values.append(env[expr.name])
        elif isinstance(expr, BinOp):
            if expr.op in ("and", "or"):
                push((self._short_circuit, expr, env))
            else:
                push((self._binop, expr.op))
                push((self._eval, expr.right, env))
            push((self._eval, expr.left, env))
        elif isinstance(expr, UnOp):
            push((self._unop, expr.op))
            push((self._eval, expr.operand, env))
        elif isinstance(expr, Verify):
            push((self._verify,))
            push((self._eval, expr.program, env))
            push((self._eval, expr.proof, env))
            push((self._eval, expr.vdesc, env))
        elif isinstance(expr, Apply):
            push((self._apply,))
            push((self._eval, expr.argument, env))
            push((self._eval, expr.program, env))
        else:
            raise TypeError(f"not an expression: {expr!r}")

    def _short_circuit(self, expr: BinOp, env: Dict[str, Value]) -> None:
        left = self._bool(self.values.pop(), expr.op)
        if (expr.op == "and" and not left) or (expr.op == "or" and left):
            self.values.append(Bool(left))
            return
        self.work.append((self._as_bool, expr.op))
        self.work.append((self._eval, expr.right, env))

    def _as_bool(self, op: str) -> None:
        self.values.append(Bool(self._bool(self.values.pop(), op)))

    def _binop(self, op: str) -> None:
        b = self.values.pop()
        a = self.values.pop()
        if op == "pair":
            self.values.append(PairV(a, b))
            return
        if op == "eq":
            self.values.append(Bool(values_equal(a, b)))
            return
        x, y = self._nat(a, op), self._nat(b, op)
        if op == "add":
            result: Value = Nat(x + y)
        elif op == "sub":
            result = Nat(max(0, x - y))
        elif op == "mul":
            result = Nat(x * y)
        else:
            result = Bool(x < y)
        self.values.append(result)

    def _unop(self, op: str) -> None:
        value = self.values.pop()
        if op == "not":
            result: Value = Bool(not self._bool(value, op))
        elif op == "tobool":
            result = Bool(truthiness(value))
        elif op == "ispair":
            result = Bool(isinstance(value, PairV))
        elif not isinstance(value, PairV):
            raise _Fault(f"type-mismatch:{op}")
        else:
            result = value.first if op == "fst" else value.second
        self.values.append(result)

    def _verify(self) -> None:
        program, proof, vdesc = self.values.pop(), self.values.pop(), self.values.pop()
        args = (vdesc, proof, program)
        if not all(isinstance(a, Str) for a in args):
            self.values.append(FALSE)
            return
        self.values.append(Bool(bool(self.oracle(vdesc.value, proof.value, program.value))))

    def _apply(self) -> None:
        argument = self.values.pop()
        source = self.values.pop()
        if not isinstance(source, Str):
            raise _Fault("type-mismatch:apply")
        try:
            callee = parse_program_cached(source.value)
        except ParseError:
            raise _Fault("apply-unparseable") from None
        self.work.append((self._frame, len(self.values)))
        self._push_call(callee, argument)


def run(program: Program, value: Value, fuel: int, verify_oracle: VerifyOracle = reject_all) -> RunResult:
    """Run ``program`` on ``value`` with at most ``fuel`` evaluation steps."""
    machine = Machine(fuel, verify_oracle)
    try:
        return Halt(machine.call(program, value))
    except _Fault as fault:
        return RuntimeFault(fault.reason)
    except _Exhausted:
        return OutOfFuel()
