#include "fpdn/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "fpdn/errors.hpp"

namespace fpdn {

namespace {

int next_pnm_token(std::istream& in) {
    // skips whitespace and '#' comment lines
    while (true) {
        int c = in.peek();
        if (c == EOF) throw IoError("truncated PNM header");
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int v;
    if (!(in >> v)) throw IoError("malformed PNM header");
    return v;
}

Image read_pgm(std::istream& in, const std::string& path, bool binary) {
    const int w = next_pnm_token(in);
    const int h = next_pnm_token(in);
    const int maxval = next_pnm_token(in);
    if (w < 1 || h < 1) throw IoError(path + ": bad PGM dimensions");
    if (maxval < 1 || maxval > 255) throw IoError(path + ": unsupported PGM maxval");
    Image img(h, w);
    if (binary) {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> buf(static_cast<size_t>(w) * h);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() != static_cast<std::streamsize>(buf.size()))
            throw IoError(path + ": truncated PGM pixel data");
        for (size_t i = 0; i < buf.size(); ++i) img.v[i] = static_cast<float>(buf[i]) / maxval;
    } else {
        for (auto& px : img.v) {
            int v;
            if (!(in >> v)) throw IoError(path + ": truncated PGM pixel data");
            px = static_cast<float>(v) / maxval;
        }
    }
    return img;
}

uint32_t rd32(const unsigned char* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd16(const unsigned char* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

Image read_bmp(std::istream& in, const std::string& path) {
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 54) throw IoError(path + ": truncated BMP header");
    const uint32_t data_off = rd32(&raw[10]);
    const uint32_t hdr_size = rd32(&raw[14]);
    if (hdr_size < 40) throw IoError(path + ": unsupported BMP header");
    const int32_t w = static_cast<int32_t>(rd32(&raw[18]));
    const int32_t h_signed = static_cast<int32_t>(rd32(&raw[22]));
    const uint16_t bpp = rd16(&raw[28]);
    const uint32_t compression = rd32(&raw[30]);
    if (compression != 0) throw IoError(path + ": compressed BMP not supported");
    if (bpp != 8 && bpp != 24) throw IoError(path + ": only 8 and 24 bpp BMP supported");
    const bool top_down = h_signed < 0;
    const int h = top_down ? -h_signed : h_signed;
    if (w < 1 || h < 1) throw IoError(path + ": bad BMP dimensions");

    const unsigned char* palette = nullptr;
    if (bpp == 8) {
        uint32_t colors = rd32(&raw[46]);
        if (colors == 0) colors = 256;
        const size_t pal_off = 14 + hdr_size;
        if (pal_off + colors * 4 > raw.size()) throw IoError(path + ": truncated BMP palette");
        palette = &raw[pal_off];
    }

    const size_t row_bytes = (static_cast<size_t>(w) * bpp / 8 + 3) & ~size_t(3);
    if (data_off + row_bytes * h > raw.size()) throw IoError(path + ": truncated BMP pixel data");

    Image img(h, w);
    for (int y = 0; y < h; ++y) {
        const int src_y = top_down ? y : h - 1 - y;
        const unsigned char* row = &raw[data_off + row_bytes * src_y];
        for (int x = 0; x < w; ++x) {
            double gray;
            if (bpp == 8) {
                const unsigned char* e = palette + 4 * row[x];  // BGRX
                gray = 0.114 * e[0] + 0.587 * e[1] + 0.299 * e[2];
            } else {
                const unsigned char* px = row + 3 * x;  // BGR
                gray = 0.114 * px[0] + 0.587 * px[1] + 0.299 * px[2];
            }
            img.at(y, x) = static_cast<float>(gray / 255.0);
        }
    }
    return img;
}

}  // namespace

Image read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0).get(m1);
    if (m0 == 'P' && m1 == '5') return read_pgm(in, path, true);
    if (m0 == 'P' && m1 == '2') return read_pgm(in, path, false);
    if (m0 == 'B' && m1 == 'M') {
        in.seekg(0);
        return read_bmp(in, path);
    }
    throw IoError(path + ": unrecognized image format (PGM or BMP expected)");
}

void write_pgm(const std::string& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    out << "P5\n" << img.w << " " << img.h << "\n255\n";
    std::vector<unsigned char> buf(img.v.size());
    for (size_t i = 0; i < img.v.size(); ++i) {
        const double v = std::clamp(static_cast<double>(img.v[i]), 0.0, 1.0);
        buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing image: " + path);
}

Image hconcat(const std::vector<Image>& imgs, int gap, float gap_value) {
    if (imgs.empty()) throw ContractError("hconcat: no images");
    const int h = imgs[0].h;
    int w = 0;
    for (const auto& im : imgs) {
        if (im.h != h) throw DimensionError("hconcat: height mismatch");
        w += im.w;
    }
    w += gap * (static_cast<int>(imgs.size()) - 1);
    Image out(h, w);
    std::fill(out.v.begin(), out.v.end(), gap_value);
    int x0 = 0;
    for (const auto& im : imgs) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < im.w; ++x) out.at(y, x0 + x) = im.at(y, x);
        x0 += im.w + gap;
    }
    return out;
}

}  // namespace fpdn
