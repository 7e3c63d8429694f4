#include "erfr/harness.hpp"

namespace erfr {

InstructionSet InstructionSet::defaults() {
    return {{"Create an Excel model.", "Use cell formulas.", "Provide a downloadable Excel file."}};
}

std::string assemble_prompt(const ProblemSpec& spec, const InstructionSet& instructions) {
    std::string prompt = spec.statement;
    if (instructions.sentences.empty()) return prompt;
    prompt += '\n';
    for (std::size_t i = 0; i < instructions.sentences.size(); ++i) {
        if (i) prompt += ' ';
        prompt += instructions.sentences[i];
    }
    return prompt;
}

std::string run_id_for(int index) {
    std::string n = std::to_string(index);
    return "run-" + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
}

}  // namespace erfr
