#include "erfr/corpus.hpp"

#include <map>

namespace erfr {

Workbook build_reference_workbook(const ProblemSpec& spec) {
    Workbook wb;
    wb.add_sheet(std::string(kDefaultSheet));
    wb.set_text(addr("A1"), "INPUTS");
    wb.set_text(addr("C1"), "OUTPUTS");

    std::map<std::string, CellAddr, std::less<>> where;
    int row = 2;
    for (const auto& in : spec.inputs) {
        wb.set_text(CellAddr{std::string(kDefaultSheet), 1, row}, in.label);
        CellAddr value{std::string(kDefaultSheet), 2, row};
        wb.set_number(value, in.default_value);
        where[in.name] = value;
        ++row;
    }
    row = 2;
    for (const auto& out : spec.outputs) {
        wb.set_text(CellAddr{std::string(kDefaultSheet), 3, row}, out.label);
        CellAddr cell{std::string(kDefaultSheet), 4, row};
        ExprPtr compiled = substitute_vars(out.oracle, [&](const std::string& name) { return make_ref(where.at(name)); });
        wb.set_formula(cell, print_formula(*compiled));
        where[out.name] = cell;
        ++row;
    }
    return wb;
}

}  // namespace erfr
