export { CorruptBinaryError, MissingColumnError } from "./errors.js";
export { encodePng, pngDimensions } from "./png.js";
export { Raster, viridis, formatTick } from "./raster.js";
export {
  COLUMN_UNITS,
  labelWithUnit,
  numericColumn,
  readDensityDump,
  readTable,
  stringColumn,
} from "./data.js";
export { render, type PlotJob, type PlotKind } from "./render.js";
export { main } from "./cli.js";
