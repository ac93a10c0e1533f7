#include "epiflow/types.hpp"

namespace epiflow {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Tir: return "tir";
        case Strategy::Sis: return "sis";
        case Strategy::Tis: return "tis";
    }
    return "tir";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "tir") return Strategy::Tir;
    if (name == "sis") return Strategy::Sis;
    if (name == "tis") return Strategy::Tis;
    throw ParseError("unknown strategy '" + name + "' (expected tir|sis|tis)");
}

}  // namespace epiflow
