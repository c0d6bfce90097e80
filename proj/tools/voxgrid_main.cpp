// Pipeline driver: sample geometry to points, voxelate points to clouds,
// build graphs/complexes, emit operators and run the heat demo.
//
// Exit codes: 0 success, 2 input/usage error, 3 topological validation
// failure.

#include <voxgrid/voxgrid.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace {

using namespace voxgrid;
using nlohmann::json;

Vec3 parse_sigma(const std::string& text)
{
    Vec3 sigma;
    double x, y, z;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &x, &y, &z) == 3)
        sigma = {x, y, z};
    else if (std::sscanf(text.c_str(), "%lf", &x) == 1)
        sigma = {x, x, x};
    else
        throw CLI::ValidationError("--sigma", "expected one or three comma-separated values");
    if (sigma.x <= 0 || sigma.y <= 0 || sigma.z <= 0)
        throw CLI::ValidationError("--sigma", "voxel sizes must be positive");
    return sigma;
}

std::optional<Index3> parse_corner(const std::string& text)
{
    if (text.empty())
        return std::nullopt;
    long long i, j, k;
    if (std::sscanf(text.c_str(), "%lld,%lld,%lld", &i, &j, &k) != 3)
        throw CLI::ValidationError("--corner", "expected i,j,k");
    return Index3{i, j, k};
}

Stencil load_stencil(const std::string& spec, bool with_cells)
{
    std::vector<Stencil> parts;
    if (spec.rfind("file:", 0) == 0)
        parts.push_back(read_stencil(spec.substr(5)));
    else
        parts.push_back(standard(stencil_kind_from_string(spec)));
    if (with_cells) {
        parts.push_back(standard(StencilKind::squareYZ));
        parts.push_back(standard(StencilKind::squareZX));
        parts.push_back(standard(StencilKind::squareXY));
        parts.push_back(standard(StencilKind::cube8));
    }
    return parts.size() == 1 ? parts[0] : merge_stencils(parts);
}

const char* plane_name(PlaneTag tag)
{
    switch (tag) {
    case PlaneTag::yz: return "yz";
    case PlaneTag::zx: return "zx";
    case PlaneTag::xy: return "xy";
    }
    return "?";
}

struct GraphFiles {
    VoxelCloud cloud;
    Stencil stencil;
    VoxelComplex complex;
};

GraphFiles load_graph(const std::string& prefix)
{
    GraphFiles g;
    g.cloud = read_voxel_cloud(prefix + "_cloud.csv");
    g.stencil = read_stencil(prefix + "_stencil.txt");
    g.complex = construct(g.cloud, g.stencil);
    return g;
}

int run_sample(const std::string& input, const std::string& kind, const std::string& sigma_text,
               const std::string& mode_text, bool no_endpoints, const std::string& out)
{
    const Vec3 sigma = parse_sigma(sigma_text);
    SampleOptions options;
    options.mode = mode_text == "thin" ? SampleMode::thin : SampleMode::conservative;
    options.emit_endpoints = !no_endpoints;

    const ObjData obj = read_obj(input);
    std::vector<Point3> points;
    if (kind == "lines") {
        if (obj.lines.segments.empty())
            throw std::invalid_argument("no line records in " + input);
        points = sample_line_network(obj.lines, Frame{}, sigma, options);
    } else if (kind == "surface") {
        if (obj.mesh.faces.empty())
            throw std::invalid_argument("no face records in " + input);
        points = sample_surface_mesh(obj.mesh, Frame{}, sigma, options);
    } else {
        if (obj.mesh.faces.empty())
            throw std::invalid_argument("no face records in " + input);
        points = sample_volume_mesh(obj.mesh, Frame{}, sigma, options);
    }
    write_points_csv(points, out);
    std::cout << "points=" << points.size() << "\n";
    return 0;
}

int run_voxelate(const std::string& points_path, const std::string& sigma_text,
                 const std::string& corner_text, const std::string& out)
{
    const Vec3 sigma = parse_sigma(sigma_text);
    const std::vector<Point3> points = read_points_csv(points_path);
    const VoxelCloud cloud =
        voxelate_point_cloud(points, Frame{}, sigma, parse_corner(corner_text));
    write_voxel_cloud(cloud, out);
    std::cout << "voxels=" << cloud.size() << "\n";
    return 0;
}

int run_graph(const std::string& cloud_path, const std::string& stencil_spec, bool with_cells,
              const std::string& prefix, bool as_json)
{
    const VoxelCloud cloud = read_voxel_cloud(cloud_path);
    const Stencil stencil = load_stencil(stencil_spec, with_cells);
    const VoxelComplex X = construct(cloud, stencil);

    write_voxel_cloud(cloud, prefix + "_cloud.csv");
    write_stencil(stencil, prefix + "_stencil.txt");
    write_matrix(X.M_EV_oriented, prefix + "_MEV.mtx");
    {
        std::ofstream out = detail::open_out(prefix + "_edges.csv");
        out << "epsilon,src_iota,dst_iota\n";
        for (std::size_t e = 0; e < X.edge_count(); ++e) {
            const auto [src, dst] = deinterleave2(MortonCode6{X.edge_ids.id(e)});
            out << X.edge_ids.id(e) << ',' << src.bits << ',' << dst.bits << '\n';
        }
    }
    if (X.faces_enumerated) {
        write_matrix(X.M_FV, prefix + "_MFV.mtx");
        write_matrix(X.M_FE_oriented, prefix + "_MFE.mtx");
        std::ofstream out = detail::open_out(prefix + "_faces.csv");
        out << "key,min_iota,plane\n";
        for (std::size_t f = 0; f < X.face_count(); ++f) {
            const auto [corner, tag] = unpack_face_key(X.face_ids.id(f));
            out << X.face_ids.id(f) << ',' << corner.bits << ',' << plane_name(tag) << '\n';
        }
    }
    if (X.cells_enumerated) {
        write_matrix(X.M_CV, prefix + "_MCV.mtx");
        write_matrix(X.M_CF_oriented, prefix + "_MCF.mtx");
        std::ofstream out = detail::open_out(prefix + "_cells.csv");
        out << "key\n";
        for (std::size_t c = 0; c < X.cell_count(); ++c)
            out << X.cell_ids.id(c) << '\n';
    }

    if (as_json) {
        const json summary = {{"V", X.vertex_count()},
                              {"E", X.edge_count()},
                              {"F", X.face_count()},
                              {"C", X.cell_count()},
                              {"chi", euler_characteristic(X)}};
        std::cout << summary.dump() << "\n";
    } else {
        std::cout << "|V|=" << X.vertex_count() << " |E|=" << X.edge_count()
                  << " |F|=" << X.face_count() << " |C|=" << X.cell_count()
                  << " chi=" << euler_characteristic(X) << "\n";
    }
    return 0;
}

int run_operators(const std::string& prefix, const std::string& emit, bool as_json)
{
    const GraphFiles g = load_graph(prefix);
    const VoxelComplex& X = g.complex;
    const OperatorSet ops = assemble_operators(X);

    std::set<std::string> wanted;
    std::stringstream ss(emit);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            wanted.insert(item);
    static const std::set<std::string> known{"G", "D", "L", "s1", "s2", "s3", "Omega"};
    for (const std::string& w : wanted)
        if (!known.count(w))
            throw std::invalid_argument("unknown operator: " + w);

    const auto covector_matrix = [&](const std::vector<double>& row) {
        std::vector<SparseEntry> coo;
        for (std::size_t c = 0; c < row.size(); ++c)
            if (row[c] != 0.0)
                coo.push_back({0, c, row[c]});
        return SparseMatrix(1, row.size(), std::move(coo));
    };

    if (wanted.count("G"))
        write_matrix(ops.G, prefix + "_G.mtx");
    if (wanted.count("D"))
        write_matrix(ops.D, prefix + "_D.mtx");
    if (wanted.count("L"))
        write_matrix(ops.L, prefix + "_L.mtx");
    if (wanted.count("s1"))
        write_matrix(covector_matrix(ops.s1), prefix + "_s1.mtx");
    if (wanted.count("s2")) {
        if (!X.faces_enumerated)
            throw std::invalid_argument("s2 requires a graph built with --cells");
        write_matrix(covector_matrix(ops.s2), prefix + "_s2.mtx");
    }
    if (wanted.count("s3")) {
        if (!X.cells_enumerated)
            throw std::invalid_argument("s3 requires a graph built with --cells");
        write_matrix(covector_matrix(ops.s3), prefix + "_s3.mtx");
    }
    if (wanted.count("Omega")) {
        if (!X.faces_enumerated)
            throw std::invalid_argument("Omega requires a graph built with --cells");
        write_matrix(ops.Omega, prefix + "_Omega.mtx");
    }

    // Assembly checks: Laplacian row sums and the cycle-basis identity.
    const std::vector<double> ones(X.vertex_count(), 1.0);
    const std::vector<double> rowsum = matvec(ops.L, ones);
    double max_rowsum = 0;
    for (double v : rowsum)
        max_rowsum = std::max(max_rowsum, std::abs(v));
    double omega_m = 0;
    if (X.faces_enumerated)
        for (const SparseEntry& e : multiply(ops.Omega, X.M_EV_oriented).entries())
            omega_m = std::max(omega_m, std::abs(e.value));

    if (as_json) {
        const json summary = {{"V", X.vertex_count()},
                              {"E", X.edge_count()},
                              {"F", X.face_count()},
                              {"C", X.cell_count()},
                              {"chi", euler_characteristic(X)},
                              {"checks", {{"rowsum", max_rowsum}, {"omegaM", omega_m}}}};
        std::cout << summary.dump() << "\n";
    } else {
        std::cout << "rowsum=" << max_rowsum << " omegaM=" << omega_m << "\n";
    }
    return 0;
}

int run_solve_heat(const std::string& prefix, const std::string& init_path, double dt,
                   int steps, const std::string& out, bool as_json)
{
    const GraphFiles g = load_graph(prefix);
    const VoxelComplex& X = g.complex;

    std::vector<double> f0(X.vertex_count(), 0.0);
    for (const auto& [id, value] : read_field(init_path)) {
        if (!X.vertex_ids.contains(id))
            throw std::invalid_argument("field id " + std::to_string(id) +
                                        " is not a vertex of the graph");
        f0[X.vertex_ids.ordinal(id)] = value;
    }

    const std::vector<double> f = solve_heat(X, f0, dt, steps);
    write_field(X.vertex_ids.ids(), f, out);

    double sum0 = 0, sum1 = 0;
    for (double v : f0)
        sum0 += v;
    for (double v : f)
        sum1 += v;
    const double drift = std::abs(sum1 - sum0);
    if (as_json)
        std::cout << json{{"steps", steps}, {"dt", dt}, {"drift", drift}}.dump() << "\n";
    else
        std::cout << "drift=" << drift << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"topological voxelization, voxel graphs and discrete operators"};
    app.require_subcommand(1);

    std::string input, kind = "surface", sigma_text, mode = "conservative", out;
    std::string points_path, corner_text, cloud_path, stencil_spec = "face6", prefix;
    std::string emit = "G,D,L", init_path;
    bool no_endpoints = false, with_cells = false, as_json = false;
    double dt = 0.1;
    int steps = 100;

    CLI::App* sample = app.add_subcommand("sample", "sample geometry into a point cloud");
    sample->add_option("--input", input, "OBJ file")->required();
    sample->add_option("--kind", kind, "lines|surface|volume")
        ->check(CLI::IsMember({"lines", "surface", "volume"}));
    sample->add_option("--sigma", sigma_text, "voxel size (scalar or x,y,z)")->required();
    sample->add_option("--mode", mode, "conservative|thin")
        ->check(CLI::IsMember({"conservative", "thin"}));
    sample->add_flag("--no-endpoints", no_endpoints, "do not emit segment endpoints");
    sample->add_option("--out", out, "points CSV")->required();

    CLI::App* voxelate_cmd = app.add_subcommand("voxelate", "points to a Morton voxel cloud");
    voxelate_cmd->add_option("--points", points_path, "points CSV")->required();
    voxelate_cmd->add_option("--sigma", sigma_text, "voxel size (scalar or x,y,z)")->required();
    voxelate_cmd->add_option("--corner", corner_text, "override the grid corner i,j,k");
    voxelate_cmd->add_option("--out", out, "cloud CSV")->required();

    CLI::App* graph = app.add_subcommand("graph", "build the voxel graph / complex");
    graph->add_option("--cloud", cloud_path, "cloud CSV")->required();
    graph->add_option("--stencil", stencil_spec, "face6|edge18|vertex26|file:PATH");
    graph->add_flag("--cells", with_cells, "enumerate square faces and cube cells");
    graph->add_option("--out-prefix", prefix, "output prefix")->required();
    graph->add_flag("--json", as_json, "machine-readable summary");

    CLI::App* operators_cmd = app.add_subcommand("operators", "emit discrete operators");
    operators_cmd->add_option("--graph-prefix", prefix, "prefix from `graph`")->required();
    operators_cmd->add_option("--emit", emit, "comma list of G,D,L,s1,s2,s3,Omega");
    operators_cmd->add_flag("--json", as_json, "machine-readable summary");

    CLI::App* heat = app.add_subcommand("solve-heat", "explicit-Euler heat flow demo");
    heat->add_option("--graph-prefix", prefix, "prefix from `graph`")->required();
    heat->add_option("--init", init_path, "initial field CSV (id,value)")->required();
    heat->add_option("--dt", dt, "time step")->required();
    heat->add_option("--steps", steps, "step count")->required();
    heat->add_option("--out", out, "final field CSV")->required();
    heat->add_flag("--json", as_json, "machine-readable summary");

    try {
        app.parse(argc, argv);
        if (sample->parsed())
            return run_sample(input, kind, sigma_text, mode, no_endpoints, out);
        if (voxelate_cmd->parsed())
            return run_voxelate(points_path, sigma_text, corner_text, out);
        if (graph->parsed())
            return run_graph(cloud_path, stencil_spec, with_cells, prefix, as_json);
        if (operators_cmd->parsed())
            return run_operators(prefix, emit, as_json);
        if (heat->parsed())
            return run_solve_heat(prefix, init_path, dt, steps, out, as_json);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const voxgrid::BoundaryNotClosedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
