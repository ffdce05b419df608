#include "relaysim/core.hpp"

namespace relaysim {

TxId Message::tx_id() const {
    return std::visit(
        [](const auto& m) -> TxId {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Inv> || std::is_same_v<T, GetData>) {
                return m.tx;
            } else {
                return m.tx.id;
            }
        },
        body);
}

std::string_view to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::Inv: return "INV";
        case MessageKind::GetData: return "GETDATA";
        case MessageKind::TxData: return "TX";
        case MessageKind::Ptx: return "PTX";
    }
    return "?";
}

std::string_view to_string(Direction dir) {
    return dir == Direction::Outbound ? "outbound" : "inbound";
}

}  // namespace relaysim
