namespace lll {}
