/**
 * Generated from archetype DEPARTMENT.
 * Identifier: departmentId.
 */
public class Department {

    /** Object identifier. */
    private int departmentId;
    private String title;
}
