#include "tsadp/checkpoint.hpp"

#include <fstream>
#include <map>

#include "io_util.hpp"

namespace tsadp {

void save_checkpoint(const TsadpModel& model, const std::string& path) {
    model.validate();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path);
    os.write("TSDP", 4);
    io::write_u32(os, kCheckpointVersion);
    const auto params = model.params();
    io::write_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        io::write_u32(os, static_cast<std::uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        io::write_u32(os, static_cast<std::uint32_t>(p.value->rows()));
        io::write_u32(os, static_cast<std::uint32_t>(p.value->cols()));
        io::write_matrix(os, *p.value);
    }
    if (!os) throw IoError("write failure on checkpoint: " + path);
}

TsadpModel load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open checkpoint for reading: " + path);
    io::expect_magic(is, "TSDP", "checkpoint");
    const std::uint32_t version = io::read_u32(is, "checkpoint version");
    if (version != kCheckpointVersion) {
        throw FormatError("unsupported checkpoint version " +
                          std::to_string(version) + ", expected " +
                          std::to_string(kCheckpointVersion));
    }
    const std::uint32_t count = io::read_u32(is, "parameter count");

    std::map<std::string, Matrix> loaded;
    std::vector<std::string> order;
    for (std::uint32_t p = 0; p < count; ++p) {
        const std::uint32_t name_len = io::read_u32(is, "parameter name length");
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) {
            throw FormatError("truncated file reading parameter name");
        }
        const std::uint32_t rows = io::read_u32(is, "parameter rows");
        const std::uint32_t cols = io::read_u32(is, "parameter cols");
        loaded[name] = io::read_matrix(is, rows, cols, name.c_str());
        order.push_back(name);
    }

    TsadpModel model;
    auto refs = model.params();
    if (order.size() != refs.size()) {
        throw FormatError("checkpoint holds " + std::to_string(order.size()) +
                          " parameters, expected " +
                          std::to_string(refs.size()));
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (order[i] != refs[i].name) {
            throw FormatError("unexpected parameter \"" + order[i] +
                              "\" at position " + std::to_string(i) +
                              ", expected \"" + refs[i].name + "\"");
        }
        *refs[i].value = loaded[order[i]];
    }
    model.validate();
    return model;
}

}  // namespace tsadp
