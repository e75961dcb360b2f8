#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msentinel/ast.hpp"
#include "msentinel/ir.hpp"
#include "msentinel/parser.hpp"
#include "msentinel/source.hpp"

namespace msentinel {

namespace detail {

// Builds one Cfg. Control transfers are plain edges; labels are placeholders
// bound to the next emitted instruction (or to Exit if nothing follows).
class CfgBuilder {
public:
    CfgBuilder(ProgramIr& ir, int& next_id, CallableId callable, std::string file,
               std::optional<std::string> enclosing_class,
               const std::vector<std::string>& params, int decl_line)
        : ir_(ir), next_id_(next_id), class_(std::move(enclosing_class)) {
        cfg_.callable = std::move(callable);
        cfg_.file = std::move(file);
        cfg_.params = params;
        decl_line_ = decl_line;
        for (auto& p : params)
            locals_.insert(p);
        Instruction entry;
        entry.kind = Instruction::Kind::Entry;
        entry.line = decl_line;
        cfg_.entry_id = emit(std::move(entry));
    }

    void lower_body(const std::vector<StmtPtr>& body) {
        for (auto& s : body)
            lower_stmt(*s);
    }

    Cfg finish() {
        Instruction exit;
        exit.kind = Instruction::Kind::Exit;
        exit.line = decl_line_;
        exit.id = next_id_++;
        cfg_.exit_id = exit.id;
        // dangling falls and labels reach the exit
        for (int e : open_ends_)
            add_edge(e, exit.id);
        open_ends_.clear();
        for (int l : open_labels_)
            label_target_[l] = exit.id;
        open_labels_.clear();
        cfg_.instructions.push_back(std::move(exit));
        for (auto& [from, label] : pending_)
            add_edge(from, label_target_.at(label));
        pending_.clear();
        for (int r : returns_)
            add_edge(r, cfg_.exit_id);
        prune_unreachable();
        cfg_.finalize_edges();
        return std::move(cfg_);
    }

private:
    ProgramIr& ir_;
    int& next_id_;
    std::optional<std::string> class_;
    Cfg cfg_;
    int decl_line_ = 0;
    int temp_counter_ = 0;

    std::set<std::string> locals_;
    std::map<std::string, std::string> copy_root_; // local -> base path it aliases

    std::vector<int> open_ends_;   // instrs whose fallthrough edge is unresolved
    std::vector<int> open_labels_; // labels bound to the next instruction
    std::map<int, int> label_target_;
    std::vector<std::pair<int, int>> pending_; // (from instr, label)
    std::vector<int> returns_;
    int label_counter_ = 0;

    int new_label() { return label_counter_++; }
    void bind(int label) { open_labels_.push_back(label); }
    void jump_from_opens(int label) {
        // reroute current fallthroughs to a label instead of the next instr
        for (int e : open_ends_)
            pending_.emplace_back(e, label);
        open_ends_.clear();
    }
    void add_edge(int from, int to) { cfg_.edges.emplace_back(from, to); }

    int emit(Instruction instr) {
        instr.id = next_id_++;
        int id = instr.id;
        for (int e : open_ends_)
            add_edge(e, id);
        open_ends_.clear();
        for (int l : open_labels_)
            label_target_[l] = id;
        open_labels_.clear();
        bool falls = instr.kind == Instruction::Kind::Entry ||
                     instr.kind == Instruction::Kind::Assign ||
                     instr.kind == Instruction::Kind::Call;
        if (instr.kind == Instruction::Kind::Return)
            returns_.push_back(id);
        cfg_.instructions.push_back(std::move(instr));
        if (falls)
            open_ends_.push_back(id);
        return id;
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw LowerError(cfg_.file + ":" + std::to_string(line) + ": " + msg);
    }

    // --- element resolution ---

    std::string path_of_name(const Expr& e) const {
        if (e.text == "this") {
            if (!class_)
                fail(e.line, "'this' used outside a method");
            return *class_;
        }
        if (locals_.count(e.text)) {
            auto it = copy_root_.find(e.text);
            return it != copy_root_.end() ? it->second : e.text;
        }
        return e.text; // global or class name
    }

    std::string path_of(const Expr& e) const {
        if (e.kind == Expr::Kind::Name)
            return path_of_name(e);
        if (e.kind == Expr::Kind::FieldAccess)
            return path_of(*e.base) + "." + e.field;
        fail(e.line, "expression cannot be used as a field base");
    }

    StateElement element_of_name(const Expr& e) const {
        if (e.text == "this")
            fail(e.line, "'this' cannot be used as a plain value");
        if (locals_.count(e.text))
            return StateElement::local(cfg_.callable, e.text);
        if (ir_.globals.count(e.text))
            return StateElement::global(e.text);
        fail(e.line, "use of undeclared name '" + e.text + "'");
    }

    StateElement element_of_field(const Expr& e) {
        std::string base = path_of(*e.base);
        bool declared = false;
        for (auto& [cls, info] : ir_.classes)
            if (info.fields.count(e.field))
                declared = true;
        if (!declared)
            ir_.warnings.push_back(cfg_.file + ":" + std::to_string(e.line) +
                                   ": field '" + e.field +
                                   "' is not declared by any class");
        return StateElement::field(std::move(base), e.field);
    }

    // --- expression lowering ---

    struct Value {
        std::vector<StateElement> uses;       // everything the expression reads
        std::optional<StateElement> atom;     // set when the value is one element
    };

    static void append(std::vector<StateElement>& dst,
                       const std::vector<StateElement>& src) {
        dst.insert(dst.end(), src.begin(), src.end());
    }

    Value lower_expr(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
        case Expr::Kind::StringLit:
        case Expr::Kind::BoolLit:
        case Expr::Kind::NullLit:
            return {};
        case Expr::Kind::Name: {
            StateElement el = element_of_name(e);
            return {{el}, el};
        }
        case Expr::Kind::FieldAccess: {
            StateElement el = element_of_field(e);
            return {{el}, el};
        }
        case Expr::Kind::Unary: {
            Value v = lower_expr(*e.base);
            return {std::move(v.uses), std::nullopt};
        }
        case Expr::Kind::Binary: {
            Value l = lower_expr(*e.base);
            Value r = lower_expr(*e.rhs);
            append(l.uses, r.uses);
            return {std::move(l.uses), std::nullopt};
        }
        case Expr::Kind::Call: {
            StateElement tmp =
                StateElement::local(cfg_.callable, "$t" + std::to_string(temp_counter_++));
            emit_call(e, tmp);
            return {{tmp}, tmp};
        }
        }
        return {};
    }

    void emit_call(const Expr& call, std::optional<StateElement> result) {
        Instruction instr;
        instr.kind = Instruction::Kind::Call;
        instr.line = call.line;
        instr.target = std::move(result);
        const Expr& callee = *call.callee;
        if (callee.kind == Expr::Kind::Name)
            instr.callee = callee.text;
        else
            instr.callee = path_of_name(*callee.base) + "." + callee.field;
        for (auto& arg : call.args) {
            Value v = lower_expr(*arg); // inner calls hoist before this one
            append(instr.uses, v.uses);
            instr.args.push_back(v.uses.size() == 1 ? v.atom : std::nullopt);
        }
        emit(std::move(instr));
    }

    // --- condition lowering: wire a boolean expression to two labels ---

    void lower_cond(const Expr& e, int true_label, int false_label) {
        if (e.kind == Expr::Kind::Binary && e.text == "&&") {
            int mid = new_label();
            lower_cond(*e.base, mid, false_label);
            bind(mid);
            lower_cond(*e.rhs, true_label, false_label);
            return;
        }
        if (e.kind == Expr::Kind::Binary && e.text == "||") {
            int mid = new_label();
            lower_cond(*e.base, true_label, mid);
            bind(mid);
            lower_cond(*e.rhs, true_label, false_label);
            return;
        }
        if (e.kind == Expr::Kind::Unary && e.text == "!") {
            lower_cond(*e.base, false_label, true_label);
            return;
        }
        Value v = lower_expr(e);
        Instruction instr;
        instr.kind = Instruction::Kind::CondBranch;
        instr.line = e.line;
        instr.uses = std::move(v.uses);
        int id = emit(std::move(instr));
        pending_.emplace_back(id, true_label);  // true edge first
        pending_.emplace_back(id, false_label);
    }

    // --- statement lowering ---

    void lower_stmt(const Stmt& s) {
        note_stmt_line(s.line);
        switch (s.kind) {
        case Stmt::Kind::VarDecl: {
            locals_.insert(s.var_name);
            StateElement target = StateElement::local(cfg_.callable, s.var_name);
            lower_store(s, target, s.var_name);
            return;
        }
        case Stmt::Kind::Assign: {
            StateElement target = s.lvalue->kind == Expr::Kind::Name
                                      ? element_of_name(*s.lvalue)
                                      : element_of_field(*s.lvalue);
            lower_store(s, target,
                        s.lvalue->kind == Expr::Kind::Name
                            ? std::optional<std::string>(s.lvalue->text)
                            : std::nullopt);
            return;
        }
        case Stmt::Kind::If: {
            int l_then = new_label(), l_else = new_label();
            lower_cond(*s.cond, l_then, l_else);
            bind(l_then);
            lower_body(s.body);
            std::vector<int> then_ends = std::move(open_ends_);
            std::vector<int> then_labels = std::move(open_labels_);
            open_ends_.clear();
            open_labels_.clear();
            bind(l_else);
            lower_body(s.orelse);
            open_ends_.insert(open_ends_.end(), then_ends.begin(), then_ends.end());
            open_labels_.insert(open_labels_.end(), then_labels.begin(),
                                then_labels.end());
            return;
        }
        case Stmt::Kind::While: {
            int l_head = new_label(), l_body = new_label(), l_exit = new_label();
            bind(l_head);
            size_t first = cfg_.instructions.size();
            lower_cond(*s.cond, l_body, l_exit);
            int head_id = cfg_.instructions[first].id;
            bind(l_body);
            lower_body(s.body);
            for (int e : open_ends_)
                add_edge(e, head_id); // back edge
            open_ends_.clear();
            for (int l : open_labels_)
                label_target_[l] = head_id;
            open_labels_.clear();
            bind(l_exit);
            return;
        }
        case Stmt::Kind::Return: {
            Instruction instr;
            instr.kind = Instruction::Kind::Return;
            instr.line = s.line;
            if (s.value) {
                Value v = lower_expr(*s.value);
                instr.uses = std::move(v.uses);
                instr.target = StateElement::return_slot(cfg_.callable);
            }
            emit(std::move(instr));
            return;
        }
        case Stmt::Kind::ExprCall:
            emit_call(*s.value, std::nullopt);
            return;
        }
    }

    // Assign / VarDecl share this; a bare call on the right becomes the Call
    // instruction's own result instead of an extra temp.
    void lower_store(const Stmt& s, StateElement target,
                     std::optional<std::string> local_name) {
        if (local_name && locals_.count(*local_name)) {
            // track what the local aliases, for field-base naming
            if (s.value->kind == Expr::Kind::Name)
                copy_root_[*local_name] = path_of_name(*s.value);
            else
                copy_root_.erase(*local_name);
        }
        if (s.value->kind == Expr::Kind::Call) {
            emit_call(*s.value, std::move(target));
            return;
        }
        Value v = lower_expr(*s.value);
        Instruction instr;
        instr.kind = Instruction::Kind::Assign;
        instr.line = s.line;
        instr.target = std::move(target);
        instr.uses = std::move(v.uses);
        emit(std::move(instr));
    }

    void note_stmt_line(int line) {
        auto& cnt = per_line_[line];
        if (++cnt == 2)
            ir_.multi_statement_lines[cfg_.file].insert(line);
    }
    std::map<int, int> per_line_; // statements per line within this callable

    void prune_unreachable() {
        std::set<int> reach;
        std::deque<int> work{cfg_.entry_id};
        std::map<int, std::vector<int>> succ;
        for (auto [a, b] : cfg_.edges)
            succ[a].push_back(b);
        while (!work.empty()) {
            int n = work.front();
            work.pop_front();
            if (!reach.insert(n).second)
                continue;
            for (int m : succ[n])
                work.push_back(m);
        }
        reach.insert(cfg_.exit_id);
        std::vector<Instruction> keep;
        for (auto& i : cfg_.instructions)
            if (reach.count(i.id))
                keep.push_back(std::move(i));
        cfg_.instructions = std::move(keep);
        std::vector<std::pair<int, int>> edges;
        for (auto [a, b] : cfg_.edges)
            if (reach.count(a) && reach.count(b))
                edges.emplace_back(a, b);
        cfg_.edges = std::move(edges);
    }
};

} // namespace detail

// Resolves spelled callees to callable ids. A bare name inside a method
// prefers a sibling method, then a free function. Unresolved calls stay
// unresolved and produce a warning.
inline void resolve_calls(ProgramIr& ir) {
    for (auto& [id, cfg] : ir.cfgs) {
        auto cls = callable_class(id);
        for (auto& instr : cfg.instructions) {
            if (instr.kind != Instruction::Kind::Call)
                continue;
            const std::string& spelled = instr.callee;
            auto dot = spelled.find('.');
            if (dot == std::string::npos) {
                if (cls) {
                    auto ci = ir.classes.find(*cls);
                    if (ci != ir.classes.end() && ci->second.methods.count(spelled)) {
                        instr.callee_resolved = *cls + "." + spelled;
                        continue;
                    }
                }
                if (ir.cfgs.count(spelled)) {
                    instr.callee_resolved = spelled;
                    continue;
                }
            } else {
                std::string base = spelled.substr(0, dot);
                std::string member = spelled.substr(dot + 1);
                auto ci = ir.classes.find(base);
                if (ci != ir.classes.end() && ci->second.methods.count(member)) {
                    instr.callee_resolved = base + "." + member;
                    continue;
                }
            }
            ir.warnings.push_back(cfg.file + ":" + std::to_string(instr.line) +
                                  ": call to '" + spelled + "' cannot be resolved");
        }
    }
}

// Lowers parsed units into per-callable control flow graphs. Instruction ids
// are unique program-wide and follow declaration order. Global initializers
// produce no instructions.
inline ProgramIr lower(const std::vector<Ast>& units) {
    ProgramIr ir;
    // declarations first, so lowering can classify names
    for (auto& unit : units) {
        for (auto& d : unit.decls) {
            if (auto* cls = std::get_if<ClassDecl>(&d)) {
                auto& info = ir.classes[cls->name];
                for (auto& f : cls->fields)
                    info.fields.insert(f);
                for (auto& m : cls->methods)
                    info.methods.insert(m.name);
            } else if (auto* g = std::get_if<GlobalDecl>(&d)) {
                ir.globals.insert(g->name);
            }
        }
    }
    int next_id = 0;
    for (auto& unit : units) {
        for (auto& d : unit.decls) {
            if (auto* cls = std::get_if<ClassDecl>(&d)) {
                for (auto& m : cls->methods) {
                    CallableId id = cls->name + "." + m.name;
                    if (ir.cfgs.count(id))
                        throw LowerError(unit.file + ": duplicate callable '" + id + "'");
                    detail::CfgBuilder b(ir, next_id, id, unit.file, cls->name,
                                         m.params, m.span.first);
                    b.lower_body(m.body);
                    ir.cfgs.emplace(id, b.finish());
                }
            } else if (auto* fn = std::get_if<FuncDecl>(&d)) {
                if (ir.cfgs.count(fn->name))
                    throw LowerError(unit.file + ": duplicate callable '" + fn->name + "'");
                detail::CfgBuilder b(ir, next_id, fn->name, unit.file, std::nullopt,
                                     fn->params, fn->span.first);
                b.lower_body(fn->body);
                ir.cfgs.emplace(fn->name, b.finish());
            }
        }
    }
    resolve_calls(ir);
    return ir;
}

inline ProgramIr lower_sources(const std::vector<SourceFile>& files) {
    std::vector<Ast> units;
    units.reserve(files.size());
    for (auto& f : files)
        units.push_back(parse(f));
    ProgramIr ir = lower(units);
    for (auto& f : files)
        ir.file_line_counts[f.path] = f.line_count();
    return ir;
}

} // namespace msentinel
