/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tlfit/isa/parser.h"

#include "tlfit/error.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <sstream>

namespace tlfit::isa {

namespace {

constexpr std::array<std::string_view, kNumOpcodes> kOpcodeNames = {
    "IADD", "IMAD", "FADD", "FFMA", "LDS",  "STS",    "ISETP",
    "P2R",  "BRA",  "MOV",  "MOVI", "CHK",  "RECORD", "EXIT",
};

constexpr std::array<std::string_view, 6> kCmpNames = {"EQ", "NE", "LT",
                                                       "LE", "GT", "GE"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto &c : out)
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::vector<std::string_view> split_operands(std::string_view s) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '[')
            ++depth;
        else if (s[i] == ']')
            --depth;
        else if (s[i] == ',' && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    auto last = trim(s.substr(start));
    if (!last.empty() || !out.empty())
        out.push_back(last);
    return out;
}

std::optional<long long> parse_int(std::string_view s) {
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s.remove_prefix(1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    if (s.empty())
        return std::nullopt;
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    if (v > 0xFFFFFFFFull)
        return std::nullopt;
    return neg ? -static_cast<long long>(v) : static_cast<long long>(v);
}

class LineParser {
  public:
    explicit LineParser(int line) : line_(line) {}

    [[noreturn]] void fail(const std::string &msg) const { throw ParseError(line_, msg); }

    int reg(std::string_view tok) const {
        auto t = upper(tok);
        if (t.size() < 2 || t[0] != 'R')
            fail("expected general register, got '" + std::string(tok) + "'");
        auto v = parse_int(std::string_view(t).substr(1));
        if (!v || *v < 0)
            fail("bad register '" + std::string(tok) + "'");
        if (*v >= kNumRegisters)
            fail("register index out of range: " + std::string(tok));
        return static_cast<int>(*v);
    }

    int pred(std::string_view tok) const {
        auto t = upper(tok);
        if (t.size() < 2 || t[0] != 'P')
            fail("expected predicate register, got '" + std::string(tok) + "'");
        auto v = parse_int(std::string_view(t).substr(1));
        if (!v || *v < 0)
            fail("bad predicate '" + std::string(tok) + "'");
        if (*v >= kNumPredicates)
            fail("predicate index out of range: " + std::string(tok));
        return static_cast<int>(*v);
    }

    std::uint32_t imm(std::string_view tok) const {
        if (auto v = parse_int(tok)) {
            if (*v < -2147483648LL)
                fail("immediate out of range: " + std::string(tok));
            return static_cast<std::uint32_t>(*v);
        }
        // Float literal: must look like one, hex handled above.
        std::string s(tok);
        if (s.find_first_of(".eE") != std::string::npos ||
            upper(s) == "INF" || upper(s) == "-INF") {
            char *end = nullptr;
            float f = std::strtof(s.c_str(), &end);
            if (end == s.c_str() + s.size())
                return std::bit_cast<std::uint32_t>(f);
        }
        fail("bad immediate '" + std::string(tok) + "'");
    }

    Operand reg_or_imm(std::string_view tok) const {
        if (looks_like_reg(tok))
            return Operand::make_reg(reg(tok));
        return Operand::make_imm(imm(tok));
    }

    Operand mov_source(std::string_view tok) const {
        auto t = upper(tok);
        Operand o;
        o.kind = Operand::Kind::Special;
        if (t == "TID") {
            o.special = SpecialReg::LaneId;
            return o;
        }
        if (t == "WARPID") {
            o.special = SpecialReg::WarpId;
            return o;
        }
        if (t == "GTID") {
            o.special = SpecialReg::GlobalId;
            return o;
        }
        return Operand::make_reg(reg(tok));
    }

    Operand mem(std::string_view tok) const {
        if (tok.size() < 2 || tok.front() != '[' || tok.back() != ']')
            fail("expected shared-memory address '[...]', got '" + std::string(tok) + "'");
        auto body = trim(tok.substr(1, tok.size() - 2));
        Operand o;
        o.kind = Operand::Kind::Mem;
        if (body.empty())
            fail("empty address");
        auto sign = body.find_first_of("+-", 1);
        std::string_view base = body, off;
        if (sign != std::string_view::npos) {
            base = trim(body.substr(0, sign));
            off = trim(body.substr(sign));
        }
        if (looks_like_reg(base)) {
            o.has_base = true;
            o.reg = static_cast<std::uint8_t>(reg(base));
            if (!off.empty()) {
                std::string joined;
                joined += off[0];
                joined += trim(off.substr(1));
                auto v = parse_int(joined);
                if (!v)
                    fail("bad address offset '" + std::string(off) + "'");
                o.offset = static_cast<std::int32_t>(*v);
            }
        } else {
            auto v = parse_int(body);
            if (!v)
                fail("bad address '" + std::string(body) + "'");
            o.offset = static_cast<std::int32_t>(*v);
        }
        return o;
    }

    static bool looks_like_reg(std::string_view tok) {
        return tok.size() >= 2 && (tok[0] == 'R' || tok[0] == 'r') &&
               std::isdigit(static_cast<unsigned char>(tok[1]));
    }

    void expect_count(const std::vector<std::string_view> &ops, std::size_t lo,
                      std::size_t hi, std::string_view mnemonic) const {
        if (ops.size() < lo || ops.size() > hi)
            fail(std::string(mnemonic) + " expects " + std::to_string(lo) +
                 (lo == hi ? "" : "-" + std::to_string(hi)) + " operands, got " +
                 std::to_string(ops.size()));
    }

  private:
    int line_;
};

struct PendingKernel {
    Kernel kernel;
    std::vector<std::pair<int, std::string>> reconv_refs; // (inst index, label)
    int line = 0;
};

Instruction parse_instruction(const LineParser &lp, std::string_view text, int line) {
    Instruction inst;
    inst.line = line;

    if (!text.empty() && text[0] == '@') {
        auto sp = text.find_first_of(" \t");
        if (sp == std::string_view::npos)
            lp.fail("guard without instruction");
        auto g = text.substr(1, sp - 1);
        if (!g.empty() && g[0] == '!') {
            inst.guard.negate = true;
            g.remove_prefix(1);
        }
        inst.guard.pred = lp.pred(g);
        text = trim(text.substr(sp));
    }

    auto sp = text.find_first_of(" \t");
    auto mnemonic = upper(text.substr(0, sp));
    auto rest = sp == std::string_view::npos ? std::string_view{} : trim(text.substr(sp));

    std::string base = mnemonic;
    std::string suffix;
    if (auto dot = mnemonic.find('.'); dot != std::string::npos) {
        base = mnemonic.substr(0, dot);
        suffix = mnemonic.substr(dot + 1);
    }
    auto op = opcode_from_name(base);
    if (!op)
        lp.fail("unknown opcode '" + mnemonic + "'");
    inst.op = *op;
    if (inst.op == Opcode::ISETP) {
        auto it = std::find(kCmpNames.begin(), kCmpNames.end(), suffix);
        if (it == kCmpNames.end())
            lp.fail("ISETP needs a comparison suffix (.EQ/.NE/.LT/.LE/.GT/.GE)");
        inst.cmp = static_cast<CmpOp>(it - kCmpNames.begin());
    } else if (!suffix.empty()) {
        lp.fail("unexpected suffix on " + base);
    }

    auto ops = split_operands(rest);
    auto set_src = [&](std::initializer_list<Operand> srcs) {
        for (const auto &s : srcs)
            inst.src[inst.num_src++] = s;
    };

    switch (inst.op) {
    case Opcode::IADD:
    case Opcode::FADD:
        lp.expect_count(ops, 3, 3, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        set_src({Operand::make_reg(lp.reg(ops[1])), lp.reg_or_imm(ops[2])});
        break;
    case Opcode::IMAD:
    case Opcode::FFMA:
        lp.expect_count(ops, 4, 4, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        set_src({Operand::make_reg(lp.reg(ops[1])), lp.reg_or_imm(ops[2]),
                 lp.reg_or_imm(ops[3])});
        break;
    case Opcode::LDS:
        lp.expect_count(ops, 2, 2, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        set_src({lp.mem(ops[1])});
        break;
    case Opcode::STS:
        lp.expect_count(ops, 2, 2, base);
        inst.dst = lp.mem(ops[0]);
        set_src({Operand::make_reg(lp.reg(ops[1]))});
        break;
    case Opcode::ISETP:
        lp.expect_count(ops, 3, 3, base);
        inst.dst = Operand::make_pred(lp.pred(ops[0]));
        set_src({Operand::make_reg(lp.reg(ops[1])), lp.reg_or_imm(ops[2])});
        break;
    case Opcode::P2R:
        lp.expect_count(ops, 1, 1, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        break;
    case Opcode::BRA:
        lp.expect_count(ops, 1, 1, base);
        if (!is_identifier(ops[0]))
            lp.fail("bad branch label '" + std::string(ops[0]) + "'");
        inst.target_label = std::string(ops[0]);
        break;
    case Opcode::MOV:
        lp.expect_count(ops, 2, 2, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        set_src({lp.mov_source(ops[1])});
        break;
    case Opcode::MOVI:
        lp.expect_count(ops, 2, 2, base);
        inst.dst = Operand::make_reg(lp.reg(ops[0]));
        set_src({Operand::make_imm(lp.imm(ops[1]))});
        break;
    case Opcode::CHK:
        lp.expect_count(ops, 3, 3, base);
        set_src({Operand::make_reg(lp.reg(ops[0])), lp.reg_or_imm(ops[1])});
        if (!is_identifier(ops[2]))
            lp.fail("bad CHK label '" + std::string(ops[2]) + "'");
        inst.target_label = std::string(ops[2]);
        break;
    case Opcode::RECORD: {
        lp.expect_count(ops, 2, 2, base);
        int lo = lp.reg(ops[0]);
        int hi = lp.reg(ops[1]);
        if (hi < lo)
            lp.fail("RECORD range is reversed");
        set_src({Operand::make_reg(lo), Operand::make_reg(hi)});
        break;
    }
    case Opcode::EXIT:
        lp.expect_count(ops, 0, 1, base);
        if (ops.size() == 1)
            set_src({Operand::make_imm(lp.imm(ops[0]))});
        break;
    }
    return inst;
}

int parse_positive(const LineParser &lp, std::string_view tok, std::string_view what,
                   bool allow_zero = false) {
    auto v = parse_int(tok);
    if (!v || *v < 0 || (*v == 0 && !allow_zero))
        lp.fail("bad " + std::string(what) + " '" + std::string(tok) + "'");
    return static_cast<int>(*v);
}

} // namespace

std::string_view opcode_name(Opcode op) { return kOpcodeNames[static_cast<std::size_t>(op)]; }

std::optional<Opcode> opcode_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kOpcodeNames.size(); ++i)
        if (kOpcodeNames[i] == name)
            return static_cast<Opcode>(i);
    return std::nullopt;
}

std::string_view cmp_name(CmpOp cmp) { return kCmpNames[static_cast<std::size_t>(cmp)]; }

bool Instruction::writes_register() const {
    switch (op) {
    case Opcode::IADD:
    case Opcode::IMAD:
    case Opcode::FADD:
    case Opcode::FFMA:
    case Opcode::LDS:
    case Opcode::P2R:
    case Opcode::MOV:
    case Opcode::MOVI:
        return true;
    default:
        return false;
    }
}

bool Instruction::writes_predicate() const { return op == Opcode::ISETP; }

int Program::find_kernel(std::string_view name) const {
    for (std::size_t i = 0; i < kernels.size(); ++i)
        if (kernels[i].name == name)
            return static_cast<int>(i);
    return -1;
}

Program parse_program(std::string_view source) {
    Program prog;
    std::vector<PendingKernel> pending;
    std::vector<std::pair<std::string, int>> launch_refs; // (name, line)
    std::vector<int> launch_counts;
    std::optional<std::string> next_reconv;
    int last_line = 0;

    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= source.size()) {
        auto nl = source.find('\n', pos);
        auto raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                  : nl - pos);
        pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
        ++line_no;
        last_line = line_no;
        LineParser lp(line_no);

        if (auto hash = raw.find('#'); hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        auto text = trim(raw);
        if (text.empty())
            continue;

        if (text[0] == '.') {
            auto sp = text.find_first_of(" \t");
            auto dir = text.substr(0, sp);
            std::istringstream args(std::string(
                sp == std::string_view::npos ? std::string_view{} : text.substr(sp)));
            std::vector<std::string> a;
            for (std::string t; args >> t;)
                a.push_back(t);
            auto need = [&](std::size_t lo, std::size_t hi) {
                if (a.size() < lo || a.size() > hi)
                    lp.fail("wrong number of arguments to " + std::string(dir));
            };
            if (dir == ".kernel") {
                need(1, 1);
                if (!is_identifier(a[0]))
                    lp.fail("bad kernel name '" + a[0] + "'");
                for (const auto &k : pending)
                    if (k.kernel.name == a[0])
                        lp.fail("duplicate kernel '" + a[0] + "'");
                if (next_reconv)
                    lp.fail(".reconv must precede a BRA or CHK");
                PendingKernel k;
                k.kernel.name = a[0];
                k.line = line_no;
                pending.push_back(std::move(k));
            } else if (dir == ".warps") {
                need(1, 1);
                prog.warps = parse_positive(lp, a[0], "warp count");
            } else if (dir == ".threads_per_warp") {
                need(1, 1);
                prog.threads_per_warp = parse_positive(lp, a[0], "threads per warp");
                if (prog.threads_per_warp > kMaxThreadsPerWarp)
                    lp.fail("threads per warp exceeds " + std::to_string(kMaxThreadsPerWarp));
            } else if (dir == ".shmem") {
                need(1, 1);
                prog.shmem_words = parse_positive(lp, a[0], "shared memory size", true);
            } else if (dir == ".output") {
                need(2, 2);
                prog.output_addr = parse_positive(lp, a[0], "output address", true);
                prog.output_len = parse_positive(lp, a[1], "output length", true);
            } else if (dir == ".launch") {
                need(1, 2);
                launch_refs.emplace_back(a[0], line_no);
                launch_counts.push_back(a.size() == 2 ? parse_positive(lp, a[1], "launch count")
                                                      : 1);
            } else if (dir == ".reconv") {
                need(1, 1);
                if (pending.empty())
                    lp.fail(".reconv outside a kernel");
                next_reconv = a[0];
            } else {
                lp.fail("unknown directive '" + std::string(dir) + "'");
            }
            continue;
        }

        // Labels, possibly several, possibly followed by an instruction.
        while (true) {
            auto colon = text.find(':');
            if (colon == std::string_view::npos)
                break;
            auto label = trim(text.substr(0, colon));
            if (!is_identifier(label))
                break;
            if (pending.empty())
                lp.fail("label outside a kernel");
            auto &k = pending.back().kernel;
            if (!k.labels.emplace(std::string(label), static_cast<int>(k.code.size())).second)
                lp.fail("duplicate label '" + std::string(label) + "'");
            text = trim(text.substr(colon + 1));
        }
        if (text.empty())
            continue;
        if (pending.empty())
            lp.fail("instruction outside a kernel");

        auto inst = parse_instruction(lp, text, line_no);
        auto &pk = pending.back();
        if (next_reconv) {
            if (inst.op != Opcode::BRA && inst.op != Opcode::CHK)
                lp.fail(".reconv must precede a BRA or CHK");
            pk.reconv_refs.emplace_back(static_cast<int>(pk.kernel.code.size()), *next_reconv);
            next_reconv.reset();
        }
        pk.kernel.code.push_back(std::move(inst));
    }

    if (next_reconv)
        throw ParseError(last_line, ".reconv must precede a BRA or CHK");
    if (pending.empty())
        throw ParseError(last_line, "program has no kernels");

    for (auto &pk : pending) {
        auto &k = pk.kernel;
        if (k.code.empty())
            throw ParseError(pk.line, "kernel has no instructions");
        auto resolve = [&](const std::string &label, int line) {
            auto it = k.labels.find(label);
            if (it == k.labels.end())
                throw ParseError(line, "unresolved label '" + label + "'");
            if (it->second >= static_cast<int>(k.code.size()))
                throw ParseError(line, "label '" + label + "' does not name an instruction");
            return it->second;
        };
        for (auto &inst : k.code)
            if (!inst.target_label.empty())
                inst.target = resolve(inst.target_label, inst.line);
        for (const auto &[idx, label] : pk.reconv_refs)
            k.code[idx].reconv = resolve(label, k.code[idx].line);
        prog.kernels.push_back(std::move(k));
    }

    for (std::size_t i = 0; i < launch_refs.size(); ++i) {
        int idx = prog.find_kernel(launch_refs[i].first);
        if (idx < 0)
            throw ParseError(launch_refs[i].second,
                             "launch of unknown kernel '" + launch_refs[i].first + "'");
        for (int c = 0; c < launch_counts[i]; ++c)
            prog.launches.push_back(idx);
    }
    if (launch_refs.empty())
        for (std::size_t i = 0; i < prog.kernels.size(); ++i)
            prog.launches.push_back(static_cast<int>(i));

    if (static_cast<long long>(prog.output_addr) + prog.output_len > prog.shmem_words)
        throw ParseError(last_line, "output region exceeds shared memory");
    return prog;
}

namespace {

std::string format_operand(const Operand &o) {
    std::ostringstream os;
    switch (o.kind) {
    case Operand::Kind::None:
        break;
    case Operand::Kind::Reg:
        os << 'R' << int(o.reg);
        break;
    case Operand::Kind::Pred:
        os << 'P' << int(o.reg);
        break;
    case Operand::Kind::Imm:
        os << "0x" << std::hex << o.imm;
        break;
    case Operand::Kind::Mem:
        os << '[';
        if (o.has_base) {
            os << 'R' << int(o.reg);
            if (o.offset != 0)
                os << (o.offset > 0 ? "+" : "-") << std::abs(o.offset);
        } else {
            os << o.offset;
        }
        os << ']';
        break;
    case Operand::Kind::Special:
        os << (o.special == SpecialReg::LaneId   ? "TID"
               : o.special == SpecialReg::WarpId ? "WARPID"
                                                 : "GTID");
        break;
    }
    return os.str();
}

} // namespace

std::string format_instruction(const Instruction &inst) {
    std::string out;
    if (inst.guard.pred >= 0)
        out += std::string("@") + (inst.guard.negate ? "!" : "") + "P" +
               std::to_string(inst.guard.pred) + " ";
    out += opcode_name(inst.op);
    if (inst.op == Opcode::ISETP)
        out += "." + std::string(cmp_name(inst.cmp));
    std::vector<std::string> parts;
    if (inst.dst.kind != Operand::Kind::None)
        parts.push_back(format_operand(inst.dst));
    for (int i = 0; i < inst.num_src; ++i)
        parts.push_back(format_operand(inst.src[i]));
    if (!inst.target_label.empty())
        parts.push_back(inst.target_label);
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i == 0 ? " " : ", ") + parts[i];
    return out;
}

} // namespace tlfit::isa
