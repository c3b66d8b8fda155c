export class MissingColumnError extends Error {
  constructor(public readonly column: string, public readonly path: string) {
    super(`missing column '${column}' in ${path}`);
    this.name = "MissingColumnError";
  }
}

export class CorruptBinaryError extends Error {
  constructor(public readonly path: string, detail: string) {
    super(`corrupt density dump ${path}: ${detail}`);
    this.name = "CorruptBinaryError";
  }
}
